import pytest

import memoryless as ml


def test_eq_protocol_verifies():
    f = ml.make_function("EQ", 3)
    p = ml.build_protocol("eq", 3)
    report = p.verify(f)
    assert report["correct"]
    assert report["pairs"] == 64
    assert p.run("101", "101")[0] == 1
    assert p.run(5, 4)[0] == 0


def test_conversion_chain():
    f = ml.make_function("IP", 2)
    p = ml.build_protocol("ip", 2)
    g = ml.nm_to_gbbp(p)
    assert g.size <= 2 ** (p.width + 1)
    assert g.verify(f)["correct"]
    assert ml.gbbp_to_nm(g).verify(f)["correct"]
    c = ml.nm_to_gh(p)
    assert c.verify(f)["correct"]
    assert ml.gh_to_nm(c).verify(f)["correct"]
    s = ml.nm_to_s(p)
    assert s.verify(f)["correct"]
    assert ml.s_to_nm(s).verify(f)["correct"]


def test_simulate_and_text_round_trip():
    p = ml.build_protocol("eq", 4)
    c = ml.nm_to_gh(p)
    assert c.simulate("0101", "0101") == ("Bob", 1)
    q = ml.NmProtocol.from_text(p.to_text())
    assert q.to_text() == p.to_text()


def test_bounds():
    assert ml.one_way_cc(ml.make_function("EQ", 4)) == 4
    assert ml.counting_bound(8) == 4.0
    assert ml.exact_cc(ml.make_function("EQ", 1)) == 2
    assert ml.nm_lower_bound(ml.make_function("EQ", 4)) == 1.0
    assert "dOneWay=2" in ml.bounds_report(ml.make_function("EQ", 2))


def test_errors():
    with pytest.raises(ml.ScaleError):
        ml.make_function("EQ", 13)
    with pytest.raises(ml.Error):
        ml.build_protocol("nosuch", 2)
