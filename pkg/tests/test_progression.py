import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distmon.formula import FALSE, TRUE, Finally, Globally, Next, PrevPow, conj, parse_formula, simplify
from distmon.lasso import eval_lasso
from distmon.progression import (
    CentralMonitor, Verdict, central_step, ltl3_verdict, progress_event, progress_trace,
)

from strategies import events, formulas, lassos

phi = parse_formula("F (a & b & c)")


class TestProgressEvent:
    def test_examples(self):
        assert progress_event(phi, {"a", "b", "c"}) is TRUE
        assert progress_event(parse_formula("X a"), {"b"}) is parse_formula("a")
        assert progress_event(phi, {"a", "b"}) is phi

    def test_connectives(self):
        assert progress_event(parse_formula("a U b"), {"a"}) is parse_formula("a U b")
        assert progress_event(parse_formula("a U b"), {"b"}) is TRUE
        assert progress_event(parse_formula("a U b"), set()) is FALSE
        assert progress_event(parse_formula("G a"), set()) is FALSE
        assert progress_event(parse_formula("!X a"), set()) is parse_formula("!a")

    def test_rejects_past(self):
        with pytest.raises(ValueError):
            progress_event(PrevPow(1, "a"), {"a"})

    @given(formulas, events, lassos)
    @settings(max_examples=400)
    def test_mimics_semantics(self, f, ev, w):
        assert eval_lasso(f, w.prepend([ev])) == eval_lasso(progress_event(f, ev), w)


class TestProgressTrace:
    def test_examples(self):
        assert progress_trace(phi, [{"a", "b"}, {"a", "b", "c"}]) is TRUE
        assert progress_trace(FALSE, [{"a"}, set()]) is FALSE
        assert progress_trace(parse_formula("G a"), [{"a"}, {"a"}]) is parse_formula("G a")

    def test_empty_trace(self):
        with pytest.raises(ValueError):
            progress_trace(phi, [])

    @given(formulas, st.lists(events, min_size=1, max_size=4), lassos)
    @settings(max_examples=200)
    def test_prefix_soundness(self, f, u, w):
        r = progress_trace(f, u)
        if r is TRUE or r is FALSE:
            assert eval_lasso(f, w.prepend(u)) == (r is TRUE)

    @given(formulas, st.lists(events, min_size=1, max_size=4), lassos)
    @settings(max_examples=200)
    def test_globally_identity(self, f, u, w):
        lhs = progress_trace(Globally(f), u)
        rhs = conj([progress_trace(f, u[i:]) for i in range(len(u))] + [Globally(f)])
        assert eval_lasso(lhs, w) == eval_lasso(rhs, w)


class TestCentralMonitor:
    def test_examples(self):
        assert central_step(CentralMonitor(phi), {"a", "b", "c"})[1] is Verdict.TOP
        assert central_step(CentralMonitor(parse_formula("G a")), set())[1] is Verdict.BOTTOM
        assert central_step(CentralMonitor(parse_formula("F a")), set())[1] is Verdict.UNKNOWN

    def test_frozen_after_verdict(self):
        m, v = central_step(CentralMonitor(parse_formula("G a")), set())
        m2, v2 = central_step(m, {"a"})
        assert v2 is v is Verdict.BOTTOM and m2 is m

    def test_rejects_past(self):
        with pytest.raises(ValueError):
            CentralMonitor(PrevPow(1, "a"))

    def test_ltl3_verdict(self):
        assert ltl3_verdict(parse_formula("X X a"), [set(), set(), {"a"}]) is Verdict.TOP
        assert ltl3_verdict(parse_formula("G F a"), [{"a"}] * 4) is Verdict.UNKNOWN

    @given(formulas, st.lists(events, min_size=1, max_size=6))
    def test_verdict_monotone(self, f, u):
        m, seen = CentralMonitor(simplify(f)), None
        for ev in u:
            m, v = central_step(m, ev)
            if seen is not None:
                assert v is seen
            elif v.conclusive:
                seen = v

    def test_verdict_of(self):
        assert Verdict.of(TRUE) is Verdict.TOP
        assert Verdict.of(Finally(Next(TRUE))) is Verdict.UNKNOWN
