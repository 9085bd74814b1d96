from __future__ import annotations

import numpy as np
import pytest

from uqflow.case_io import (
    bundled_case_names,
    load_case,
    parse_matpower,
    serialize_case,
    to_network,
)
from uqflow.errors import CaseFormatError, CaseValidationError


def test_case39_table_shapes():
    case = load_case("bundled:case39")
    assert case.name == "new_england_39"
    assert case.base_mva == 100.0
    assert case.bus.shape[0] == 39
    assert case.gen.shape[0] == 10
    assert case.branch.shape[0] == 46
    assert case.warnings == []


def test_demo_case_loads():
    case = load_case("bundled:demo-3bus")
    assert case.bus.shape[0] == 3
    assert case.gen.shape[0] == 2
    assert case.branch.shape[0] == 3


def test_bundled_aliases_resolve():
    names = bundled_case_names()
    assert "new-england-39" in names
    assert "demo-3bus" in names
    a = load_case("bundled:case39")
    b = load_case("bundled:new-england-39")
    assert a.name == b.name
    np.testing.assert_array_equal(a.bus, b.bus)


def test_unknown_bundled_case():
    with pytest.raises(CaseValidationError):
        load_case("bundled:case9000")
    with pytest.raises(FileNotFoundError):
        load_case("/nowhere/case9000.m")


def test_serialization_is_a_fixed_point():
    case = load_case("bundled:case39")
    text = serialize_case(case)
    reparsed = parse_matpower(text, name=case.name)
    assert serialize_case(reparsed) == text
    np.testing.assert_array_equal(reparsed.bus, case.bus)
    np.testing.assert_array_equal(reparsed.gen, case.gen)
    np.testing.assert_array_equal(reparsed.branch, case.branch)


def test_parse_accepts_comments_and_semicolons():
    case = load_case("bundled:demo-3bus")
    text = serialize_case(case)
    commented = "% leading comment\n" + text.replace(
        "mpc.baseMVA = 100", "mpc.baseMVA = 100  % MVA base"
    )
    reparsed = parse_matpower(commented)
    np.testing.assert_array_equal(reparsed.bus, case.bus)


def test_ragged_row_is_line_numbered(data_dir):
    with pytest.raises(CaseFormatError) as err:
        load_case(str(data_dir / "ragged_row.m"))
    assert err.value.line == 6
    assert "column" in str(err.value)


def test_bad_token_is_line_numbered(data_dir):
    with pytest.raises(CaseFormatError) as err:
        load_case(str(data_dir / "bad_token.m"))
    assert err.value.line == 12
    assert "oops" in str(err.value)


def test_duplicate_bus_is_line_numbered(data_dir):
    with pytest.raises(CaseFormatError) as err:
        load_case(str(data_dir / "duplicate_bus.m"))
    assert err.value.line == 6
    assert "duplicate" in str(err.value)


def test_unknown_field_becomes_warning(data_dir):
    case = load_case(str(data_dir / "unknown_field.m"))
    assert len(case.warnings) == 1
    assert "gencost" in case.warnings[0]
    assert case.bus.shape[0] == 2  # parsing continued past the unknown block


def test_to_network_structure():
    net = to_network(load_case("bundled:case39"))
    assert net.n == 39
    kinds = [b.kind for b in net.buses]
    assert kinds.count("slack") == 1
    assert kinds.count("pv") == 9
    assert kinds.count("pq") == 29
    assert len(net.non_slack) == 38
    assert net.n_unknowns == 38 + 29
    # position maps external ids to row order
    for row, bus in enumerate(net.buses):
        assert net.position[bus.id] == row


def test_to_network_demo_buses():
    net = to_network(load_case("bundled:demo-3bus"))
    slack, pv, pq = net.buses
    assert slack.kind == "slack" and slack.v_set == 1.0
    assert pv.kind == "pv" and pv.v_set == 1.05 and pv.p_gen == pytest.approx(0.6661)
    assert pq.kind == "pq"
    assert pq.p_load == pytest.approx(2.8653)
    assert pq.q_load == pytest.approx(1.2244)
    assert len(net.branches) == 3
    assert all(br.x == pytest.approx(0.1) for br in net.branches)
