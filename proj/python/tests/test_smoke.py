import pytest

import ksmaster

LINE_6_3 = "1234,3456,5612."


def test_master_40_32():
    lines = ksmaster.master("0,±1", 4)
    assert len(lines) == 1
    line, ks = lines[0]
    assert ks
    assert ksmaster.size_class(line) == "40-32"
    assert ksmaster.coordinatize(line.split(".")[0] + ".", "0,±1") is not None


def test_six_three():
    assert ksmaster.is_ks(LINE_6_3)
    assert ksmaster.is_critical(LINE_6_3)
    assert ksmaster.find_assignment(LINE_6_3) is None
    assert ksmaster.stats(LINE_6_3)["delta_pairs"] == 3


def test_assignment_is_valid():
    line = "1234,4567,789A."
    a = ksmaster.find_assignment(line)
    for edge in line.rstrip(".").split(","):
        assert sum(a[c] for c in edge) == 1


def test_canonical_form_ignores_labels():
    line, _ = ksmaster.master("0,±1", 4)[0]
    shuffled = ksmaster.shuffle(line, 7)
    assert ksmaster.canonical_form(shuffled) == ksmaster.canonical_form(line)
    assert ksmaster.are_isomorphic(shuffled, line)


def test_criticals_of_40_32():
    line, _ = ksmaster.master("0,±1", 4)[0]
    report = ksmaster.criticals(line, mode="exhaustive")
    assert report["complete"]
    assert [c["size_class"] for c in report["classes"]][0] == "18-9"
    assert len(report["classes"]) == 6


def test_decompose():
    assert ksmaster.decompose(["1", "1", "1", "-1"]) == "(|H>|h> + |V>|v>)/sqrt(2)"
    assert ksmaster.decompose(["0", "0", "0", "1"]) == "|V>|-2>"


def test_bad_line_raises():
    with pytest.raises(ValueError):
        ksmaster.size_class("12 34.")
