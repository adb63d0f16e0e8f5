import json
from fractions import Fraction

import pytest

from alsq.cli import main
from alsq.measures import dumps_measure, load_measure, make_measure
from alsq.selftest import example_two

F = Fraction


@pytest.fixture
def six_atom_file(tmp_path):
    path = tmp_path / "six.json"
    path.write_text(dumps_measure(example_two()))
    return str(path)


@pytest.fixture
def four_atom_file(tmp_path):
    mu = make_measure([(2 ** k, F(1, 4)) for k in range(4)])
    path = tmp_path / "four.json"
    path.write_text(dumps_measure(mu))
    return str(path)


def test_analyze_text_output(capsys, six_atom_file):
    code = main(["analyze", six_atom_file])
    out = capsys.readouterr().out
    assert code == 0
    assert "15 distinct" in out
    assert "square root  : witness" in out


def test_analyze_json_schema(capsys, six_atom_file):
    code = main(["analyze", six_atom_file, "--json"])
    data = json.loads(capsys.readouterr().out)
    assert code == 0
    assert data["schema"] == "alsq/1"
    assert data["card"] == 15
    assert data["agreement"] is True
    assert data["sqrt"]["outcome"] == "witness"


def test_analyze_diagram_flag(capsys, six_atom_file):
    main(["analyze", six_atom_file, "--diagram"])
    out = capsys.readouterr().out
    assert "coincidence classes:" in out


def test_aluthge_exit_codes(capsys, six_atom_file, four_atom_file):
    assert main(["aluthge", six_atom_file]) == 0
    assert main(["aluthge", four_atom_file]) == 2
    out = capsys.readouterr().out
    assert "four-atom-family" in out


def test_sqrt_json_verdict(capsys, four_atom_file):
    code = main(["sqrt", four_atom_file, "--json"])
    data = json.loads(capsys.readouterr().out)
    assert code == 2
    assert data["outcome"] == "impossible"
    assert data["schema"] == "alsq/1"


def test_convolve_writes_file(tmp_path, capsys, six_atom_file):
    out_path = tmp_path / "conv.json"
    code = main(["convolve", six_atom_file, six_atom_file,
                 "--out", str(out_path)])
    assert code == 0
    result = load_measure(str(out_path))
    assert result.p == 15


def test_shift_table(capsys, six_atom_file):
    code = main(["shift", six_atom_file, "--terms", "4"])
    out = capsys.readouterr().out
    assert code == 0
    assert "aluthge gamma" in out
    assert len([l for l in out.splitlines() if l.strip()]) == 5


def test_recurrence_output(capsys, six_atom_file):
    code = main(["recurrence", six_atom_file, "--max-order", "7"])
    out = capsys.readouterr().out
    assert code == 0
    assert "order 6" in out


def test_gen_roundtrip(tmp_path, capsys):
    out_path = tmp_path / "gen.json"
    witness_path = tmp_path / "wit.json"
    code = main(["gen", "--p", "5", "--mode", "with-root", "--seed", "11",
                 "--out", str(out_path), "--witness-out", str(witness_path)])
    assert code == 0
    mu = load_measure(str(out_path))
    assert mu.p == 5
    assert load_measure(str(witness_path)).p == 3
    assert main(["sqrt", str(out_path)]) == 0


def test_gen_stdout_json(capsys):
    code = main(["gen", "--p", "3", "--mode", "with-aluthge-root",
                 "--seed", "5"])
    data = json.loads(capsys.readouterr().out)
    assert code == 0
    assert data["schema"] == "alsq/1"
    assert len(data["measure"]["atoms"]) == 3
    assert data["witness"] is not None


def test_gen_determinism(capsys):
    main(["gen", "--p", "6", "--seed", "9", "--mode", "with-aluthge-root"])
    first = capsys.readouterr().out
    main(["gen", "--p", "6", "--seed", "9", "--mode", "with-aluthge-root"])
    assert capsys.readouterr().out == first


def test_missing_file_is_usage_error(capsys, tmp_path):
    assert main(["analyze", str(tmp_path / "absent.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_invalid_measure_is_usage_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"radical_base": "1", "mode": "rational", "atoms": []}')
    assert main(["analyze", str(path)]) == 1


def test_precision_flag_roundtrip(capsys, six_atom_file):
    code = main(["aluthge", six_atom_file, "--precision", "192", "--json"])
    data = json.loads(capsys.readouterr().out)
    assert code == 0 and data["precision_bits"] == 192
