import csv
import io
import json

import pytest

from markovj.cli import RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            RunConfig(depth=0)
        with pytest.raises(ValueError):
            RunConfig(tol=1e-3)
        with pytest.raises(ValueError):
            RunConfig(series_order=10)
        with pytest.raises(ValueError):
            RunConfig(fmt="xml")


class TestTree:
    def test_depth_two(self, capsys):
        code, out, _ = run(capsys, "--depth", "2", "tree")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        fracs = {f"{r['p']}/{r['q']}" for r in rows}
        assert fracs == {"0/1", "1/2", "1/3", "1/4", "2/5"}
        by_frac = {f"{r['p']}/{r['q']}": r for r in rows}
        assert by_frac["1/3"]["period"] == "2,3,4"
        assert by_frac["1/4"]["period"] == "2,3_2,4"

    def test_json_depth_one(self, capsys):
        code, out, _ = run(capsys, "--depth", "1", "--format", "json", "tree")
        assert code == 0
        assert len(json.loads(out)) == 3

    def test_invalid_depth(self, capsys):
        code, _, err = run(capsys, "--depth", "0", "tree")
        assert code == 2
        assert "depth" in err


class TestValue:
    def test_left_tip(self, capsys):
        code, out, _ = run(capsys, "value", "0/1")
        assert code == 0
        assert "1359.56741044" in out

    def test_published_row(self, capsys):
        code, out, _ = run(capsys, "--format", "json", "value", "12/25")
        assert code == 0
        rec = json.loads(out)
        assert rec["j_re"].startswith("709.773605298")
        assert rec["j_im"].startswith("-0.033413159")

    def test_off_tree_fraction(self, capsys):
        code, _, err = run(capsys, "value", "3/5")
        assert code == 2
        assert "0/1" in err and "1/2" in err

    def test_path_target(self, capsys):
        code, out, _ = run(capsys, "value", "RL")
        assert code == 0
        assert "3/8" in out


class TestTable:
    def test_layout_and_order(self, capsys):
        code, out, _ = run(capsys, "--depth", "2", "--tol", "1e-8", "table")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "path,level,p,q,c,Jq_re,Jq_im,j_re,j_im,log_eps,quad_err"
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[0]["p"] == "0" and rows[-1]["p"] + "/" + rows[-1]["q"] == "1/2"
        assert float(rows[0]["Jq_re"]) == pytest.approx(1359.56741044, rel=1e-8)

    def test_warm_cache_identical(self, capsys, tmp_path):
        cache = str(tmp_path / "cache.jsonl")
        args = ("--depth", "2", "--tol", "1e-8", "--cache", cache, "table")
        _, cold, _ = run(capsys, *args)
        cache_bytes = (tmp_path / "cache.jsonl").read_bytes()
        _, warm, _ = run(capsys, *args)
        assert warm == cold
        assert (tmp_path / "cache.jsonl").read_bytes() == cache_bytes

    def test_corrupted_cache(self, capsys, tmp_path):
        cache = tmp_path / "cache.jsonl"
        cache.write_text('{"schema": 0}\n')
        code, _, err = run(capsys, "--depth", "2", "--cache", str(cache), "table")
        assert code == 2
        assert "schema" in err


class TestReports:
    def test_interlace(self, capsys, tmp_path):
        code, out, _ = run(capsys, "--depth", "3", "--tol", "1e-8", "interlace")
        assert code == 0
        assert "result: PASS" in out

    def test_asymptotics_json(self, capsys):
        code, out, _ = run(capsys, "--depth", "20", "--format", "json", "asymptotics")
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_bounds(self, capsys):
        code, out, _ = run(capsys, "--format", "json", "bounds", "--k0", "12")
        assert code == 0
        rec = json.loads(out)
        assert rec["re_delta_bound"] == pytest.approx(1.41173, abs=1e-3)

    def test_verify_small_depth(self, capsys):
        code, out, _ = run(capsys, "--depth", "3", "--tol", "1e-8", "verify")
        assert code == 0
        assert "verify: PASS" in out
