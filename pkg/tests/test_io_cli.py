import json
from fractions import Fraction

import numpy as np
import pytest

from hlike.algebra import MetricAlgebra
from hlike.cli import main, parse_matrix
from hlike.fixtures import f32, gornet_mast, h5, star
from hlike.io import AlgebraFileError, algebra_from_json, algebra_to_json, read_algebra, write_algebra


def doc(J, p=None, q=None, **extra):
    d = {"format": "hlie-v1", "p": len(J) if p is None else p, "q": (len(J[0]) if J else 1) if q is None else q, "J": J}
    d.update(extra)
    return d


def test_round_trip_rational(tmp_path):
    alg = gornet_mast(Fraction(1, 3), 2, 1)
    write_algebra(alg, tmp_path / "a.json")
    back, adj = read_algebra(tmp_path / "a.json")
    assert back.is_exact and adj == []
    assert np.array_equal(back.exact.generators, alg.exact.generators)
    assert back.label == alg.label


def test_round_trip_decimal_is_bit_identical(tmp_path):
    rng = np.random.default_rng(0)
    M = rng.standard_normal((2, 5, 5))
    alg = MetricAlgebra(M - np.swapaxes(M, 1, 2), 5, "random")
    write_algebra(alg, tmp_path / "b.json")
    back, _ = read_algebra(tmp_path / "b.json")
    assert not back.is_exact
    assert np.array_equal(back.j_basis, alg.j_basis)


def test_decimal_symmetrization_is_recorded():
    back, adj = algebra_from_json(doc([[["0", "-1.0"], ["1.0000000000000002", "0"]]]))
    assert adj and adj[0]["block"] == 0
    assert back.j_basis[0, 0, 1] == -back.j_basis[0, 1, 0]


@pytest.mark.parametrize(
    "bad, field",
    [
        (doc([[["0", "1"], ["1", "0"]]]), "J[0]"),
        (doc([[["0", "-1.0"], ["1.001", "0"]]]), "J[0]"),
        (doc([[["0", "x"], ["1", "0"]]]), "J[0][0][1]"),
        (doc([[["0", "1/0"], ["-1", "0"]]]), "J[0][0][1]"),
        (doc([[["0", "nan"], ["nan", "0"]]]), "J[0][0][1]"),
        (doc([], p=0, q=2), "p"),
        ({"format": "other", "p": 1, "q": 2, "J": []}, "format"),
        (doc([[["0", "-1"], ["1", "0"]]], p=2), "J"),
        (doc([[["0", "-1"]]], q=2), "J[0]"),
        ({"format": "hlie-v1", "q": 2}, "p"),
    ],
)
def test_malformed_documents_name_the_field(bad, field):
    with pytest.raises(AlgebraFileError) as e:
        algebra_from_json(bad)
    assert field in str(e.value)


def test_abelian_flag():
    alg, _ = algebra_from_json(doc([], p=0, q=3, abelian=True))
    assert (alg.p, alg.q) == (0, 3)
    assert algebra_to_json(alg)["abelian"] is True


def test_unreadable_and_invalid_json(tmp_path):
    with pytest.raises(AlgebraFileError):
        read_algebra(tmp_path / "missing.json")
    (tmp_path / "x.json").write_text('{"format": \n nope}')
    with pytest.raises(AlgebraFileError, match="line 2"):
        read_algebra(tmp_path / "x.json")


def test_parse_matrix():
    M = parse_matrix("1,0;0,2/3")
    assert M.shape == (2, 2) and M[1, 1] == Fraction(2, 3)
    with pytest.raises(ValueError):
        parse_matrix("1,0;1")


@pytest.fixture
def files(tmp_path):
    for args in (["f32"], ["h3"], ["h5", "--a", "1", "--b", "0"], ["star", "--m", "5"],
                 ["gornet_mast", "--a", "1", "--b", "2"]):
        name = "_".join(args).replace("--", "").replace(" ", "")
        assert main(["examples", *args, "-o", str(tmp_path / f"{name}.json")]) == 0
    return tmp_path


def test_examples_command_matches_fixtures(files, capsys):
    alg, _ = read_algebra(files / "f32.json")
    assert np.array_equal(alg.exact.generators, f32().exact.generators)
    alg, _ = read_algebra(files / "star_m_5.json")
    assert np.array_equal(alg.exact.generators, star(5).exact.generators)
    alg, _ = read_algebra(files / "h5_a_1_b_0.json")
    assert np.array_equal(alg.exact.generators, h5(1, 0).exact.generators)
    assert main(["examples", "h5", "--a", "1", "--b", "2"]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["J"][0][1] == ["1", "0", "0", "0"]
    assert main(["examples", "f32", "--a", "1"]) == 1


def test_analyze_exit_codes(files, capsys):
    assert main(["analyze", str(files / "f32.json"), "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "HLike" and out["j_rank"] == 2
    assert out["spectrum"] == [{"b": "0", "mult": 1}, {"b": "1", "mult": 1}]
    assert main(["analyze", str(files / "h5_a_1_b_0.json")]) == 2
    assert main(["construct", "direct-sum", str(files / "h3.json"), str(files / "h3.json"),
                 "-o", str(files / "h3_plus_h3.json")]) == 0
    capsys.readouterr()
    assert main(["analyze", str(files / "h3_plus_h3.json"), "--json"]) == 3
    out = json.loads(capsys.readouterr().out)
    assert np.allclose(out["witness"]["direction"], [2 ** -0.5, 2 ** -0.5])
    assert main(["analyze", str(files / "missing.json")]) == 1
    assert main(["analyze", str(files / "f32.json"), "--mode", "sampled"]) == 0


def test_construct_commands(files, capsys):
    assert main(["construct", "tensor", str(files / "h3.json"), "--sym", "1,0;0,2", "-o", str(files / "t.json")]) == 0
    assert main(["analyze", str(files / "t.json"), "--json"]) == 0
    out = capsys.readouterr().out
    assert '"verdict": "HLike"' in out
    assert main(["construct", "central-sum", str(files / "h3.json"), str(files / "h3.json"), "--phi", "identity",
                 "-o", str(files / "c.json")]) == 0
    assert main(["analyze", str(files / "c.json"), "--json"]) == 0
    assert '"verdict": "HType"' in capsys.readouterr().out
    assert main(["construct", "submersion", str(files / "f32.json"), "--kernel", "0,0,1",
                 "-o", str(files / "s.json")]) == 0
    assert "measured    {0, ±1i}" in capsys.readouterr().out
    assert main(["construct", "tensor", str(files / "h3.json"), "--sym", "1,1;1,1"]) == 1


def test_construct_subspace_sum_command(files, capsys):
    code = main(["construct", "subspace-sum", "--slot", str(files / "f32.json"), "--spectrum", "1:1,0:1",
                 "--slot", str(files / "f32.json"), "--spectrum", "1:1,0:1", "-o", str(files / "ss.json")])
    assert code == 0
    assert "{0×2, ±1i×2}" in capsys.readouterr().out
    code = main(["construct", "subspace-sum", "--slot", str(files / "f32.json"), "--spectrum", "1:2"])
    assert code == 1
    assert "hypothesis (2)" in capsys.readouterr().err


def test_classify_rank2_command(files, capsys):
    assert main(["classify-rank2", str(files / "star_m_5.json")]) == 0
    assert json.loads(capsys.readouterr().out)["name"] == "AlmostAbelianStar(5)"
    assert main(["classify-rank2", str(files / "f32.json")]) == 0
    assert json.loads(capsys.readouterr().out)["name"] == "FreeF32"
    assert main(["classify-rank2", str(files / "gornet_mast_a_1_b_2.json")]) == 4
    assert json.loads(capsys.readouterr().out)["reason"] == "j_rank=4"


def test_search_command(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["search", "--q", "4", "--p", "2", "--spectrum", "1:1,2:1", "-o", str(out)]) == 0
    result = json.loads(out.read_text())
    assert result["result"]["verified"] is True
    alg, _ = read_algebra(tmp_path / "r.algebra.json")
    assert (alg.p, alg.q) == (2, 4)
    assert main(["search", "--q", "2", "--p", "2", "--spectrum", "1:1"]) == 5
    assert main(["search", "--q", "3", "--p", "3", "--spectrum", "1:1,0:1"]) == 0
    assert main(["search", "--q", "3", "--p", "3", "--spectrum", "1:x"]) == 1
    assert main(["search", "--q", "3", "--p", "3", "--spectrum", "1:2"]) == 1


def test_search_command_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["search", "--q", "4", "--p", "2", "--spectrum", "1:1,2:1", "--seed", "4", "-o", str(a)])
    main(["search", "--q", "4", "--p", "2", "--spectrum", "1:1,2:1", "--seed", "4", "-o", str(b)])
    assert a.read_text() == b.read_text()
