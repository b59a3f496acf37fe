"""The bi-population test cases used by the multi-species sweep."""

from typing import List, Tuple

from spin_inverse.errors import NumericalError
from spin_inverse.meanfield.susceptibility import limit_values
from spin_inverse.models import MsParams
from spin_inverse.sampling.sampler import make_generator

DEFAULT_GROUP_SIZES = (1000, 1000)
CANONICAL_SEED = 20170101
CASE_COUNT = 20

SELF_COUPLING_RANGE = (0.55, 1.2)
CROSS_COUPLING_RANGE = (-0.6, 1.1)
FIELD_RANGE = (-0.3, 0.3)

# Largest and smallest reconstruction errors among the published cases.
CASE_1 = MsParams(
    group_sizes=DEFAULT_GROUP_SIZES,
    coupling_matrix=((1.2, 0.98), (0.98, 0.8)),
    field_vector=(0.1, 0.2),
)
CASE_18 = MsParams(
    group_sizes=DEFAULT_GROUP_SIZES,
    coupling_matrix=((0.6, -0.8), (-0.8, 0.9)),
    field_vector=(-0.2, -0.3),
)


def has_unique_stable_solution(params: MsParams) -> bool:
    """True when the mean-field system has one stable, non-critical solution."""
    try:
        limit_values(params)
    except NumericalError:
        return False
    return True


def draw_cases(
    count: int,
    seed: int,
    group_sizes: Tuple[int, ...] = DEFAULT_GROUP_SIZES,
) -> List[MsParams]:
    """Uniform two-group cases within the sweep ranges, rounded to 2 decimals.

    Draws without a unique stable solution are rejected and redrawn.
    """
    generator = make_generator(seed)
    cases: List[MsParams] = []
    while len(cases) < count:
        j11, j22 = (round(float(v), 2) for v in generator.uniform(*SELF_COUPLING_RANGE, size=2))
        j12 = round(float(generator.uniform(*CROSS_COUPLING_RANGE)), 2)
        h1, h2 = (round(float(v), 2) for v in generator.uniform(*FIELD_RANGE, size=2))
        candidate = MsParams(
            group_sizes=tuple(group_sizes),
            coupling_matrix=((j11, j12), (j12, j22)),
            field_vector=(h1, h2),
        )
        if has_unique_stable_solution(candidate):
            cases.append(candidate)
    return cases


def canonical_cases() -> List[MsParams]:
    """Twenty cases: case 1 and case 18 as published, the rest drawn.

    The 18 drawn cases come from draw_cases(18, CANONICAL_SEED) and fill
    positions 2-17 and 19-20 in draw order.
    """
    drawn = draw_cases(CASE_COUNT - 2, CANONICAL_SEED)
    return [CASE_1] + drawn[:16] + [CASE_18] + drawn[16:]
