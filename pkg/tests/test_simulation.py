import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distmon.decentral import Architecture
from distmon.formula import FALSE, parse_formula
from distmon.progression import Verdict
from distmon.simulation import (
    GlobalTrace, TraceError, architecture_from_dict, architecture_to_dict, compare_run,
    dump_trace, load_trace, parse_trace_lines, run_centralised, run_decentralised,
)

from strategies import events, formulas

ABC = Architecture.from_partition([["a"], ["b"], ["c"]])
ONE = Architecture.from_partition([["a", "b", "c"]])
phi = parse_formula("F (a & b & c)")
EXAMPLE = GlobalTrace.from_global(ABC, [{"a", "b"}, {"a", "b", "c"}, set(), set()])


class TestGlobalTrace:
    def test_projection(self):
        assert EXAMPLE.global_event(1) == {"a", "b", "c"}
        assert EXAMPLE.local_event(2, 0) == frozenset()
        assert EXAMPLE.local_trace(0) == [{"a"}, {"a"}, set(), set()]

    def test_from_local_matches_global(self):
        local = [EXAMPLE.local_trace(i) for i in range(3)]
        assert GlobalTrace.from_local(ABC, local).events() == EXAMPLE.events()

    def test_padding(self):
        assert EXAMPLE.padded(2).events()[-2:] == [frozenset(), frozenset()]
        assert len(EXAMPLE.prefix(2)) == 2

    def test_errors(self):
        with pytest.raises(TraceError):
            GlobalTrace.from_local(ABC, [[{"a"}], [{"b"}], []])
        with pytest.raises(TraceError):
            GlobalTrace.from_local(ABC, [[{"b"}], [set()], [set()]])
        with pytest.raises(TraceError):
            GlobalTrace.from_global(ABC, [{"z"}])


class TestDecentralised:
    def test_worked_example(self):
        res = run_decentralised(ABC, phi, EXAMPLE, record=True)
        assert (res.verdict, res.time, res.monitor, res.messages) == (Verdict.TOP, 3, 1, 7)
        sends = [sorted((o.state.index, o.message.receiver) for o in row if o.message) for row in res.log]
        assert sends[:3] == [[(0, 1), (1, 0)], [(0, 2), (1, 2), (2, 0)], [(0, 1), (2, 0)]]
        assert res.max_past_depth <= ABC.n

    def test_local_bottom(self):
        trace = GlobalTrace.from_global(ABC, [{"a"}, {"b"}])
        res = run_decentralised(ABC, parse_formula("G a"), trace)
        assert (res.verdict, res.time, res.monitor) == (Verdict.BOTTOM, 1, 0)

    def test_inconclusive_counts_all_rounds(self):
        trace = GlobalTrace.from_global(ABC, [{"a"}] * 3)
        res = run_decentralised(ABC, parse_formula("F b"), trace, 2)
        # A and C each hand their copy to B once, then wait
        assert res.verdict is Verdict.UNKNOWN and res.steps == 5 and res.messages == 2

    def test_rejects_foreign_trace(self):
        with pytest.raises(TraceError):
            run_decentralised(ONE, phi, EXAMPLE)

    def test_rejects_unknown_props(self):
        with pytest.raises(TraceError):
            run_decentralised(ABC, parse_formula("F z"), EXAMPLE)

    @given(formulas, st.lists(events, min_size=1, max_size=6))
    @settings(max_examples=150)
    def test_message_bound(self, f, u):
        res = run_decentralised(ABC, f, GlobalTrace.from_global(ABC, u), 3)
        assert res.messages <= ABC.n * res.steps


class TestCentralised:
    def test_example(self):
        res = run_centralised(ABC, phi, EXAMPLE)
        assert (res.verdict, res.time, res.messages) == (Verdict.TOP, 1, 6)

    def test_false(self):
        res = run_centralised(ABC, FALSE, EXAMPLE)
        assert (res.verdict, res.time, res.messages) == (Verdict.BOTTOM, 0, 3)

    def test_inconclusive(self):
        res = run_centralised(ABC, parse_formula("G F a"), EXAMPLE)
        assert res.verdict is Verdict.UNKNOWN and res.messages == 4 * 3


class TestCompare:
    def test_example(self):
        c, d = compare_run(ABC, phi, EXAMPLE.prefix(2))
        assert (c.verdict, c.time, c.messages) == (Verdict.TOP, 1, 6)
        assert (d.verdict, d.time, d.messages) == (Verdict.TOP, 3, 7)

    def test_no_padding_when_central_inconclusive(self):
        trace = GlobalTrace.from_global(ABC, [set()])
        c, d = compare_run(ABC, parse_formula("G a"), trace)
        assert c.verdict is Verdict.BOTTOM
        c, d = compare_run(ABC, parse_formula("a U b"), GlobalTrace.from_global(ABC, [{"a"}]))
        assert c.verdict is d.verdict is Verdict.UNKNOWN and d.steps == 1

    @given(formulas, st.lists(events, min_size=1, max_size=6))
    @settings(max_examples=150)
    def test_single_component_matches_central(self, f, u):
        c, d = compare_run(ONE, f, GlobalTrace.from_global(ONE, u))
        assert (d.verdict, d.time, d.messages) == (c.verdict, c.time, 0)


class TestFiles:
    def test_architecture_round_trip(self):
        assert architecture_from_dict(architecture_to_dict(ABC)) == ABC

    def test_malformed_architecture(self):
        with pytest.raises(ValueError):
            architecture_from_dict({"components": [{"name": "A"}]})

    def test_trace_round_trip(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        path.write_text(dump_trace(EXAMPLE))
        assert load_trace(ABC, path).events() == EXAMPLE.events()

    def test_missing_components_are_empty(self):
        trace = parse_trace_lines(ABC, ['{"t": 0, "components": {"A": ["a"]}}', ""])
        assert trace.events() == [{"a"}]

    @pytest.mark.parametrize("lines", [
        ['{"t": 1, "components": {}}'],
        ['{"t": 0, "components": {"Z": []}}'],
        ['{"t": 0, "components": {"A": ["b"]}}'],
        ["not json"],
    ])
    def test_trace_errors(self, lines):
        with pytest.raises(TraceError):
            parse_trace_lines(ABC, lines)

    def test_dump_format(self):
        first = json.loads(dump_trace(EXAMPLE).splitlines()[0])
        assert first == {"t": 0, "components": {"A": ["a"], "B": ["b"], "C": []}}
