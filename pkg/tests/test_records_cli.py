import json
from fractions import Fraction

import pytest

from brieskorn import cli
from brieskorn.ke import derive
from brieskorn.records import (
    FIELDS,
    RecordRow,
    csv_header,
    from_json_line,
    parse_fraction,
    read_csv,
    read_json_lines,
    to_csv_line,
    to_json_line,
)
from brieskorn.search import Search, classify


@pytest.fixture(scope="module")
def rows():
    recs = list(Search(7, max_last=45).records())
    recs.append(classify(derive([2, 3, 6, 7])))  # non-sphere, no bp class
    recs.append(classify(derive([2, 3, 7, 35])))  # even m, no tau
    return [RecordRow.from_record(r) for r in recs]


class TestRecords:
    def test_json_roundtrip(self, rows):
        for row in rows:
            assert from_json_line(to_json_line(row)) == row

    def test_csv_equals_json(self, rows):
        text = csv_header() + "".join(to_csv_line(r) for r in rows)
        assert read_csv(text) == rows
        assert read_json_lines(to_json_line(r) for r in rows) == rows

    def test_field_order(self, rows):
        assert tuple(json.loads(to_json_line(rows[0]))) == FIELDS
        assert csv_header().strip().split(",") == list(FIELDS)

    def test_empty_optionals(self, rows):
        line = to_csv_line(rows[-1])
        assert ",," in line
        assert json.loads(to_json_line(rows[-1]))["tau"] is None

    def test_fraction(self):
        assert parse_fraction("211/210") == Fraction(211, 210)
        with pytest.raises(ValueError):
            parse_fraction("1.5")

    def test_bad_csv(self):
        with pytest.raises(ValueError):
            read_csv("x,y\n1,2\n")
        header = csv_header()
        with pytest.raises(ValueError):
            read_csv(header + "1,2\n")

    def test_summary_skipped(self, rows):
        lines = [to_json_line(rows[0]), json.dumps({"summary": {"total": 1}})]
        assert read_json_lines(lines) == [rows[0]]


class TestCli:
    def test_check_pass(self, capsys):
        assert cli.main(["check", "2", "3", "7", "35"]) == 0
        assert "verdict: PASS" in capsys.readouterr().out

    def test_check_fail_json(self, capsys):
        assert cli.main(["check", "2", "3", "7", "42", "--json"]) == 1
        out = json.loads(capsys.readouterr().out)
        assert out["fano_sum"] == "1/1" and out["passes"] is False

    def test_check_usage(self, capsys):
        assert cli.main(["check", "2", "3"]) == 2
        assert "error" in capsys.readouterr().err
        assert cli.main(["check", "1", "3", "5"]) == 2

    def test_argparse_errors(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["check", "x"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit):
            cli.main([])

    def test_classify(self, capsys):
        assert cli.main(["classify", "2", "3", "7", "43", "1333", "--json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["tau"] == 224000 and d["bp_class"] == 0 and d["moduli_real_dim"] == 82

    def test_classify_text(self, capsys):
        assert cli.main(["classify", "2", "2", "2", "3", "5"]) == 0
        out = capsys.readouterr().out
        assert "signature    : 8" in out and "1 of 28" in out

    def test_classify_budget(self, capsys):
        assert cli.main(["classify", "2", "3", "5", "7", "43", "1807", "3263443", "--method", "brute"]) == 3
        assert "--method dp" in capsys.readouterr().err

    def test_moduli(self, capsys):
        assert cli.main(["moduli", "2", "3", "7", "35", "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["real_dim"] == 10

    def test_bp_order(self, capsys):
        assert cli.main(["bp-order", "16"]) == 0
        assert capsys.readouterr().out.strip() == "8128"
        assert cli.main(["bp-order", "10"]) == 2

    def test_sylvester(self, capsys):
        assert cli.main(["sylvester", "7"]) == 0
        assert capsys.readouterr().out.split()[-1] == "10650056950807"
        assert cli.main(["sylvester", "0"]) == 2

    def test_enumerate_dim5(self, capsys):
        assert cli.main(["enumerate", "--dim", "5", "--jobs", "1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        summary = json.loads(lines[-1])["summary"]
        assert len(read_json_lines(lines)) == 68 == summary["total"]
        assert summary["classes"] == {"Standard": 68}

    def test_enumerate_csv_summary_on_stderr(self, capsys):
        assert cli.main(["enumerate", "--dim", "5", "--out", "csv", "--jobs", "1"]) == 0
        cap = capsys.readouterr()
        assert len(read_csv(cap.out)) == 68
        assert '"summary"' in cap.err

    def test_enumerate_usage(self, capsys):
        assert cli.main(["enumerate", "--dim", "6"]) == 2
        assert cli.main(["enumerate", "--dim", "9"]) == 2

    @pytest.mark.parametrize("fmt", ["json", "csv"])
    def test_resume_byte_identical(self, tmp_path, fmt):
        base = ["enumerate", "--dim", "7", "--max-last", "60", "--jobs", "1", "--out", fmt]
        ref = tmp_path / "ref.out"
        assert cli.main(base + ["--output", str(ref)]) == 0

        out = tmp_path / "run.out"
        ck = tmp_path / "run.ckpt"
        args = base + ["--output", str(out), "--checkpoint", str(ck)]
        assert cli.main(args + ["--stop-after-prefixes", "2"]) == 0
        with open(out, "a") as fh:
            fh.write("partial garbage from an interrupted prefix\n")
        assert cli.main(args) == 0
        assert out.read_bytes() == ref.read_bytes()

    def test_resume_mismatch(self, tmp_path, capsys):
        ck = tmp_path / "c.json"
        args = ["enumerate", "--dim", "7", "--max-last", "30", "--jobs", "1",
                "--output", str(tmp_path / "o"), "--checkpoint", str(ck)]
        assert cli.main(args + ["--stop-after-prefixes", "1"]) == 0
        args[4] = "31"
        assert cli.main(args) == 2

    def test_tables_quick(self, capsys):
        lines = cli.table_lines(include_dim7=False)
        assert lines and all(ok for _, ok in lines)
