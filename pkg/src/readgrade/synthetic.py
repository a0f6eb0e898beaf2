"""Synthetic English-like text with controllable difficulty.

Used by the mock provider and by the fixture corpora in the test suite. Text
difficulty is steered by sentence length and by the mix of word pools:
short familiar words, two-syllable familiar words, words missing from the
Dale-Chall list, and long academic words.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .metrics import GradeBand
from .textstats import WordLists, count_syllables, default_word_lists

__all__ = ["BandRecipe", "RECIPES", "word_pools", "synthetic_text"]

# Uncommon short words (one or two syllables) absent from the Dale-Chall list.
_SHORT_RARE = """
atom gene cell axis orbit comet quartz fungus spore prism lens nerve flux ion
tissue pollen nectar magma lava crater glacier delta canyon plateau basin marsh
tundra fossil mineral crystal pulse valve organ virus germ enzyme protein vapor
thesis theme motif genre verse rhyme stanza sonnet tempo chord scale rhythm
ballet mural sketch canvas easel kiln glaze loom fresco relief statue portrait
tariff budget credit market tax trade border treaty census clan tribe
""".split()

# Long academic words (three or more syllables), mostly absent from both lists.
_LONG_RARE = """
photosynthesis organization interpretation civilization revolutionary
environmental respiratory circulatory metabolism evaporation condensation
precipitation gravitational electromagnetic consequently additionally
particularly significantly fundamental theoretical experimental hypothesis
methodology perspective phenomenon phenomena characteristic considerable
constitutional democracy legislative judicial economical inflationary
infrastructure sustainability biodiversity ecosystem atmospheric velocity
acceleration momentum equilibrium molecular cellular mitochondria chromosome
genetic evolutionary adaptation population agricultural industrialization
geographical topography latitude longitude hemisphere continental
archaeological historical philosophical psychological sociological cognitive
emotional behavioral nutritional physiological cardiovascular immunity
antibiotic bacteria vaccination epidemic pandemic composition symphony
orchestral harmonious melodious improvisation choreography renaissance
impressionism sculptural architectural perspective symmetrical geometrical
mathematical algorithmic computational statistical probability variability
artificial intelligence autonomous automation robotic simulation
categorization generalization specialization collaboration communication
representation transformation distribution contribution participation
""".split()


@dataclass(frozen=True)
class BandRecipe:
    """Sentence length range and pool weights for one band."""

    words_per_sentence: tuple[int, int]
    easy1: float
    easy2: float
    familiar_not_spache: float
    short_rare: float
    long_rare: float


# Tuned so that the seven integrated metrics and ARI land on the intended band.
RECIPES: dict[GradeBand, BandRecipe] = {
    GradeBand.LOWER_ELEMENTARY: BandRecipe((3, 5), 0.95, 0.0, 0.05, 0.0, 0.0),
    GradeBand.MIDDLE_ELEMENTARY: BandRecipe((9, 10), 0.64, 0.22, 0.09, 0.05, 0.0),
    GradeBand.UPPER_ELEMENTARY: BandRecipe((13, 15), 0.60, 0.21, 0.08, 0.11, 0.0),
    GradeBand.MIDDLE_SCHOOL: BandRecipe((15, 21), 0.52, 0.24, 0.09, 0.15, 0.0),
    GradeBand.HIGH_SCHOOL: BandRecipe((19, 24), 0.45, 0.19, 0.15, 0.15, 0.06),
    GradeBand.ADULT: BandRecipe((25, 28), 0.16, 0.09, 0.22, 0.12, 0.41),
}


@lru_cache(maxsize=4)
def _pools(lists: WordLists) -> dict[str, tuple[str, ...]]:
    dc, sp = lists.dale_chall_words, lists.spache_words

    def plain(w: str) -> bool:
        return w.isalpha() and len(w) > 1

    both = sorted(w for w in dc & sp if plain(w))
    easy1 = tuple(w for w in both if count_syllables(w) == 1)
    easy2 = tuple(w for w in both if count_syllables(w) == 2)
    dc_only = tuple(sorted(w for w in dc - sp if plain(w) and count_syllables(w) <= 2))
    short_rare = tuple(sorted({w for w in _SHORT_RARE if w not in dc and count_syllables(w) <= 2}))
    long_rare = tuple(sorted({w for w in _LONG_RARE if w not in dc and count_syllables(w) >= 3}))
    return {
        "easy1": easy1,
        "easy2": easy2,
        "familiar_not_spache": dc_only,
        "short_rare": short_rare,
        "long_rare": long_rare,
    }


def word_pools(lists: WordLists | None = None) -> dict[str, tuple[str, ...]]:
    return _pools(lists or default_word_lists())


def synthetic_text(
    band: GradeBand | int,
    rng: random.Random,
    sentences: int = 6,
    max_words: int | None = None,
    lists: WordLists | None = None,
) -> str:
    """Generate ``sentences`` sentences aimed at ``band``.

    ``max_words`` caps the sentence length, mirroring the length cap in the
    answer-generation prompts.
    """
    recipe = RECIPES[GradeBand(band)]
    pools = word_pools(lists)
    names = ("easy1", "easy2", "familiar_not_spache", "short_rare", "long_rare")
    weights = [getattr(recipe, n) for n in names]
    lo, hi = recipe.words_per_sentence
    if max_words is not None:
        hi = max(1, min(hi, max_words))
        lo = min(lo, hi)
    out = []
    for _ in range(sentences):
        n = rng.randint(lo, hi)
        words = [rng.choice(pools[rng.choices(names, weights)[0]]) for _ in range(n)]
        words[0] = words[0].capitalize()
        out.append(" ".join(words) + ".")
    return " ".join(out)
