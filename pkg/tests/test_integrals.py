import math

import pytest

from markovj.integrals import (
    ArcIntegrator,
    average_integral,
    cache_record,
    compute_values,
    integrate_J,
    log_epsilon,
    read_cache,
    write_cache,
)
from markovj.tree import ROOT, TIP_LEFT, TIP_RIGHT, build_tree, node_at


class TestLogEpsilon:
    def test_small_values(self):
        assert log_epsilon(1) == pytest.approx(math.log((3 + math.sqrt(5)) / 2), rel=1e-14)
        assert log_epsilon(2) == pytest.approx(math.log(3 + 2 * math.sqrt(2)), rel=1e-14)
        assert log_epsilon(5) == pytest.approx(2.703575830931402, rel=1e-14)

    def test_huge_argument(self):
        c = 10**500
        assert log_epsilon(c) == pytest.approx(math.log(3) + 500 * math.log(10), rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            log_epsilon(0)


class TestIntegrateJ:
    def test_left_tip(self, series):
        v = integrate_J(TIP_LEFT, tol=1e-10, integrator=ArcIntegrator(series))
        assert v.J_over_q.real == pytest.approx(1359.56741044, rel=1e-9)
        assert abs(v.J_over_q.imag) < 1e-9
        assert v.j.real == pytest.approx(706.324813541, rel=1e-9)

    def test_right_tip(self, series):
        v = integrate_J(TIP_RIGHT, tol=1e-10, integrator=ArcIntegrator(series))
        assert v.J_over_q.real == pytest.approx(1251.36168734, rel=1e-9)
        assert v.j.real == pytest.approx(709.892890920, rel=1e-9)

    def test_root(self, series):
        v = integrate_J(ROOT, tol=1e-10, integrator=ArcIntegrator(series))
        assert v.log_eps == pytest.approx(2.703575830931402, rel=1e-13)
        assert v.j == v.J / (2 * v.log_eps)
        assert v.J_over_q.imag < 0  # reference orientation

    def test_error_estimate_is_honest(self, series):
        integ = ArcIntegrator(series)
        loose = integrate_J(ROOT, tol=1e-6, integrator=integ)
        tight = integrate_J(ROOT, tol=1e-12, integrator=integ)
        assert abs(loose.J - tight.J) <= max(loose.quad_error, 1e-9) * 10

    def test_rejects_bad_tol(self):
        with pytest.raises(ValueError):
            integrate_J(ROOT, tol=0.0)


class TestAverage:
    def test_value(self, series):
        avg = average_integral(tol=1e-9, integrator=ArcIntegrator(series))
        assert avg == pytest.approx(753.9822368615, abs=1e-6)


class TestComputeValues:
    def test_parallel_matches_serial(self, series):
        nodes = build_tree(3)
        serial = compute_values(nodes, tol=1e-9, series=series, jobs=1)
        parallel = compute_values(nodes, tol=1e-9, series=series, jobs=2)
        assert serial.keys() == parallel.keys()
        for path in serial:
            assert serial[path].J == pytest.approx(parallel[path].J, rel=1e-12)


class TestCache:
    def test_round_trip(self, tmp_path, series):
        node = node_at("R")
        value = integrate_J(node, tol=1e-8, integrator=ArcIntegrator(series))
        path = tmp_path / "cache.jsonl"
        write_cache([value], path)
        records = read_cache(path)
        assert len(records) == 1
        rec = records[0]
        assert rec["path"] == "R"
        assert rec == cache_record(value)
        assert rec["J_re"] == value.J.real

    def test_schema_check(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        path.write_text('{"schema": 999, "path": "R"}\n')
        with pytest.raises(ValueError):
            read_cache(path)
