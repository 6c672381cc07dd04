from __future__ import annotations

from hypothesis import HealthCheck, settings, strategies as st

from artinglue.finset import FinFn, FinSet

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def finsets(draw, max_size: int = 4):
    return FinSet.range(draw(st.integers(0, max_size)))


@st.composite
def finfns(draw, dom: FinSet | None = None, cod: FinSet | None = None, max_size: int = 4):
    dom = dom if dom is not None else draw(finsets(max_size))
    if cod is None:
        cod = FinSet.range(draw(st.integers(1 if len(dom) else 0, max_size)))
    if len(cod) == 0:
        return FinFn(dom, cod, ())
    table = draw(st.lists(st.sampled_from(cod.elements), min_size=len(dom), max_size=len(dom)))
    return FinFn(dom, cod, tuple(table))


@st.composite
def cospans(draw, max_size: int = 4):
    c = draw(finsets(max_size).filter(len))
    return draw(finfns(cod=c, max_size=max_size)), draw(finfns(cod=c, max_size=max_size))


@st.composite
def spans(draw, max_size: int = 4):
    a = draw(finsets(max_size))
    return draw(finfns(dom=a, max_size=max_size)), draw(finfns(dom=a, max_size=max_size))


@st.composite
def parallel_pairs(draw, max_size: int = 4):
    f = draw(finfns(max_size=max_size))
    return f, draw(finfns(dom=f.dom, cod=f.cod, max_size=max_size))
