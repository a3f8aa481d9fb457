import json

import pytest

from trirank import cli, tensor
from trirank.fields import make_field

F3 = make_field(3)


@pytest.fixture
def levi_path(tmp_path):
    path = tmp_path / "levi.t"
    tensor.dump(tensor.levi_civita(F3), str(path))
    return str(path)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def test_ar_subcommand(levi_path, tmp_path):
    out = tmp_path / "ar.json"
    rc = cli.run(["ar", "--tensor", levi_path, "--out", str(out)])
    assert rc == 0
    rep = read_json(out)
    assert rep["schema"] == 1
    assert rep["ar"]["zero_count"] == 105


def test_ar_histogram_csv(levi_path, tmp_path):
    out = tmp_path / "hist.csv"
    rc = cli.run(["ar", "--tensor", levi_path, "--histogram", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("b_vector,count")
    assert len(lines) == 1 + 27
    counts = [int(l.rsplit(",", 1)[1]) for l in lines[1:]]
    assert sum(counts) == 729 and counts[0] == 105


def test_gr_subcommand(levi_path, tmp_path):
    out = tmp_path / "gr.json"
    rc = cli.run(["gr", "--tensor", levi_path, "--kmax", "3", "--cross-check",
                  "--out", str(out)])
    assert rc == 0
    rep = read_json(out)
    assert rep["gr"]["gr"] == 2
    assert rep["gr"]["consistent"] is True


def test_sr_subcommand_and_bounds(levi_path, tmp_path):
    out = tmp_path / "sr.json"
    assert cli.run(["sr", "--tensor", levi_path, "--out", str(out)]) == 0
    assert read_json(out)["sr"]["lo"] == 3
    assert cli.run(["sr", "--tensor", levi_path, "--exact", "--out", str(out)]) == 0
    assert read_json(out)["sr"] == read_json(out)["sr"]
    assert cli.run(["sr", "--tensor", levi_path, "--bounds", "--out", str(out)]) == 0
    b = read_json(out)["sr"]
    assert b["lo"] <= 3 <= b["hi"]


def test_chain_subcommand_exit_codes(levi_path, tmp_path):
    out = tmp_path / "chain.json"
    rc = cli.run(["chain", "--tensor", levi_path, "--field", "3^1", "--kmax", "3",
                  "--seed", "7", "--out", str(out)])
    assert rc == 0
    rep = read_json(out)["chain"]
    assert rep["sr"]["lo"] == 3 and rep["gr"]["gr"] == 2
    # field assertion mismatch is a usage error
    assert cli.run(["chain", "--tensor", levi_path, "--field", "5^1"]) == 2


def test_decompose_and_verify_round_trip(levi_path, tmp_path):
    dpath = tmp_path / "d.json"
    rc = cli.run(["decompose", "--tensor", levi_path, "--kwork", "3", "--seed", "7",
                  "--out", str(dpath)])
    assert rc == 0
    assert read_json(dpath)["verified"] is True
    assert cli.run(["verify", "--tensor", levi_path, "--decomp", str(dpath)]) == 0
    # verifying against a different tensor fails with exit 1
    other = tmp_path / "i3.t"
    tensor.dump(tensor.identity_tensor(F3, 3), str(other))
    assert cli.run(["verify", "--tensor", str(other), "--decomp", str(dpath)]) == 1


def test_szcheck_subcommand(tmp_path):
    spath = tmp_path / "sys.txt"
    spath.write_text("x1*x2")
    out = tmp_path / "sz.json"
    rc = cli.run(["szcheck", "--system", str(spath), "--field", "3^1",
                  "--nvars", "2", "--kmax", "3", "--out", str(out)])
    assert rc == 0
    rep = read_json(out)
    assert rep["sz"]["holds"] and rep["sz"]["lhs"] == "5/9"
    # syntax errors are usage errors
    spath.write_text("x1 +* x2")
    assert cli.run(["szcheck", "--system", str(spath), "--field", "3^1",
                    "--nvars", "2"]) == 2


def test_extremal_and_closeness(tmp_path):
    prefix = str(tmp_path / "pair")
    rc = cli.run(["extremal", "--r", "1", "--t", "1", "--n", "2", "--field", "3^1",
                  "--out-prefix", prefix])
    assert rc == 0
    out = tmp_path / "close.json"
    rc = cli.run(["closeness", "--f", prefix + "_f.t", "--g", prefix + "_g.t",
                  "--out", str(out)])
    assert rc == 0
    assert read_json(out)["closeness"]["delta"] == "25/81"


def test_missing_file_and_bad_usage():
    assert cli.run(["ar", "--tensor", "/nonexistent/missing.t"]) == 2
    assert cli.run(["nonsense"]) == 2
    assert cli.run([]) == 2


def test_reports_are_byte_identical_for_fixed_seed(levi_path, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        rc = cli.run(["chain", "--tensor", levi_path, "--seed", "7", "--out", str(out)])
        assert rc == 0
    assert a.read_bytes() == b.read_bytes()


def test_corpus_smoke(tmp_path, monkeypatch):
    # shrink the random block so the smoke test stays fast
    def small_corpus(seed):
        return [
            ("identity_2", tensor.identity_tensor(F3, 2)),
            ("levi_civita", tensor.levi_civita(F3)),
        ] + [
            (f"random_{i}", tensor.random_tensor(F3, (3, 3, 3), seed=seed ^ i))
            for i in range(3)
        ]

    monkeypatch.setattr(cli, "builtin_corpus", small_corpus)
    out_dir = tmp_path / "corpus"
    out = tmp_path / "summary.json"
    rc = cli.run(["corpus", "--seed", "7", "--out-dir", str(out_dir),
                  "--out", str(out)])
    assert rc == 0
    summary = read_json(out)["summary"]
    assert summary["items"] == 5 and summary["errors"] == 0
    assert summary["max_sr_gr_ratio"] == "3/2"
    csv_lines = (out_dir / "summary.csv").read_text().strip().splitlines()
    assert len(csv_lines) == 6
    assert (out_dir / "levi_civita.json").exists()


def test_builtin_corpus_contents():
    items = cli.builtin_corpus(seed=0)
    names = [n for n, _ in items]
    assert names[:6] == ["identity_1", "identity_2", "identity_3", "identity_4",
                         "levi_civita", "t2_direct_sum"]
    assert len(items) == 56
