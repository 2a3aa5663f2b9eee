import json

import pytest

from relcascade.cli import main
from relcascade.data import Sentence, Triple, serialize_corpus
from relcascade.synthetic import SyntheticSpec, generate_synthetic_corpus


def write_corpus(path, sentences):
    serialize_corpus(sentences, path)
    return str(path)


@pytest.fixture
def small_files(tmp_path):
    spec = SyntheticSpec(n_sentences=16, n_relations=3)
    sentences, schema = generate_synthetic_corpus(spec, 2)
    train_f = write_corpus(tmp_path / "train.jsonl", sentences)
    dev_f = write_corpus(tmp_path / "dev.jsonl", sentences[:4])
    schema_f = tmp_path / "schema.txt"
    schema.save(schema_f)
    return tmp_path, train_f, dev_f, str(schema_f)


class TestEvaluateCommand:
    def test_identical_pred_gold_prints_perfect_f1(self, tmp_path, capsys):
        sents = [Sentence("a r b .", [Triple("a", "r", "b")])]
        f = write_corpus(tmp_path / "g.jsonl", sents)
        assert main(["evaluate", "--pred", f, "--gold", f]) == 0
        out = capsys.readouterr().out
        assert "1.0000" in out

    def test_elements_and_breakdown(self, tmp_path, capsys):
        sents = [
            Sentence("a", [Triple("A", "r1", "B"), Triple("A", "r2", "B")]),
            Sentence("b", [Triple("C", "r1", "D")]),
        ]
        f = write_corpus(tmp_path / "g.jsonl", sents)
        code = main(["evaluate", "--pred", f, "--gold", f,
                     "--elements", "--breakdown", "overlap"])
        assert code == 0
        out = capsys.readouterr().out
        assert "(h,r,t)" in out and "EPO" in out

    def test_byte_identical_reports(self, tmp_path):
        sents = [Sentence("a r b .", [Triple("a", "r", "b")])]
        f = write_corpus(tmp_path / "g.jsonl", sents)
        r1, r2 = tmp_path / "r1.txt", tmp_path / "r2.txt"
        main(["evaluate", "--pred", f, "--gold", f, "--report", str(r1)])
        main(["evaluate", "--pred", f, "--gold", f, "--report", str(r2)])
        assert r1.read_bytes() == r2.read_bytes()

    def test_missing_file_exit_1(self, capsys):
        assert main(["evaluate", "--pred", "/no/such.jsonl", "--gold", "/no/such.jsonl"]) == 1
        assert "error" in capsys.readouterr().err


class TestUsageErrors:
    def test_unknown_subcommand_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_help_exits_zero(self, capsys):
        for cmd in ["train", "extract", "evaluate", "stats", "simulate-posterior", "gradcheck"]:
            with pytest.raises(SystemExit) as exc:
                main([cmd, "--help"])
            assert exc.value.code == 0
            assert "--" in capsys.readouterr().out


class TestStatsCommand:
    def test_counts(self, tmp_path, capsys):
        sents = [
            Sentence("a", [Triple("A", "r1", "B")]),
            Sentence("b", [Triple("A", "r1", "B"), Triple("A", "r2", "B")]),
        ]
        f = write_corpus(tmp_path / "c.jsonl", sents)
        assert main(["stats", "--data", f]) == 0
        out = capsys.readouterr().out
        assert "#ALL" in out and "2" in out


class TestSimulatePosterior:
    def test_reference_run(self, capsys):
        code = main(["simulate-posterior", "--p12", "0.5", "--robs", "1.0",
                     "--samples", "100000", "--seed", "0"])
        assert code == 0
        record = json.loads(capsys.readouterr().out)
        assert abs(record["closed_form_mean"] - 0.5) < 1e-12
        assert record["mse_conditional"] < record["mse_unconditional"]

    def test_invalid_p22_exit_1(self, capsys):
        code = main(["simulate-posterior", "--p22", "0", "--samples", "10000"])
        assert code == 1
        assert "p22" in capsys.readouterr().err


class TestGradcheckCommand:
    def test_passes(self, capsys):
        assert main(["gradcheck", "--seed", "0"]) == 0
        assert "PASS" in capsys.readouterr().out


class TestTrainExtractPipeline:
    def test_end_to_end(self, small_files, capsys):
        tmp_path, train_f, dev_f, schema_f = small_files
        ckpt = str(tmp_path / "model.pt")
        code = main([
            "train", "--train", train_f, "--dev", dev_f, "--schema", schema_f,
            "--seed", "0", "--out", ckpt, "--learning-rate", "5e-3",
            "--max-epochs", "4",
        ])
        assert code == 0
        out_f = str(tmp_path / "pred.jsonl")
        code = main(["extract", "--model", ckpt, "--input", dev_f, "--output", out_f])
        assert code == 0
        lines = [ln for ln in open(out_f, encoding="utf-8") if ln.strip()]
        assert len(lines) == 4
        code = main(["evaluate", "--pred", out_f, "--gold", dev_f, "--mode", "exact"])
        assert code == 0
