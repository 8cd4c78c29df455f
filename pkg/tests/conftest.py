from fractions import Fraction

import pytest
from hypothesis import settings

from riskchoice.choices import Correspondence
from riskchoice.design import builtin_design

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def design():
    return builtin_design()


@pytest.fixture(scope="session")
def lots(design):
    return design.lotteries


def corr(design, choices: dict, sid="T"):
    """Correspondence over the whole design; menus not in ``choices`` are empty."""
    chosen = {m: frozenset(choices.get(m, ())) for m in design.menus}
    return Correspondence(sid, design.menus, chosen)


def menus_corr(menus: dict, choices: dict, sid="T"):
    menus = {m: frozenset(v) for m, v in menus.items()}
    return Correspondence(sid, menus, {m: frozenset(choices.get(m, ())) for m in menus})


F = Fraction
