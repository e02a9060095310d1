import numpy as np
import pytest

from meemi.alignment import align_supervised
from meemi.cli import main
from meemi.embeddings import EmbeddingSpace, load_space, save_space
from meemi.lexicon import load_lexicon
from meemi.refinement import apply_meemi, fit_meemi


@pytest.fixture
def rotated_files(tmp_path):
    code = main(
        "fixture rotated --vocab 200 --dim 16 --sigma 0.05 --seed 42 --out".split()
        + [str(tmp_path / "fx")]
    )
    assert code == 0
    fx = tmp_path / "fx"
    return {
        "src": fx / "src.vec",
        "tgt": fx / "tgt.vec",
        "dict": fx / "gold.dict",
        "map": fx / "rotation.map",
    }


def run_align(paths, out, extra=()):
    return main(
        [
            "align",
            "--src", str(paths["src"]),
            "--tgt", str(paths["tgt"]),
            "--dict", str(paths["dict"]),
            "--out", str(out),
            *extra,
        ]
    )


class TestAlign:
    def test_writes_three_files_and_prints_coverage(self, rotated_files, tmp_path, capsys):
        assert run_align(rotated_files, tmp_path / "out") == 0
        out = capsys.readouterr().out
        assert "coverage 1.0000" in out
        assert "iterations 1" in out
        for name in ("source_mapped.vec", "target_normalized.vec", "alignment.map"):
            assert (tmp_path / "out" / name).exists()

    def test_missing_dict_flag_is_usage_error(self, rotated_files, tmp_path, capsys):
        code = main(
            ["align", "--src", str(rotated_files["src"]), "--tgt", str(rotated_files["tgt"]),
             "--out", str(tmp_path / "out")]
        )
        assert code == 2

    def test_nonexistent_dict_path_is_usage_error(self, rotated_files, tmp_path):
        bad = dict(rotated_files)
        bad["dict"] = tmp_path / "nope.dict"
        assert run_align(bad, tmp_path / "out") == 2
        assert not (tmp_path / "out").exists()

    def test_self_learning_single_iteration_matches_plain(self, rotated_files, tmp_path):
        assert run_align(rotated_files, tmp_path / "plain") == 0
        assert run_align(
            rotated_files, tmp_path / "boot", extra=["--self-learning", "--max-iter", "1"]
        ) == 0
        for name in ("source_mapped.vec", "target_normalized.vec", "alignment.map"):
            assert (tmp_path / "plain" / name).read_bytes() == (
                tmp_path / "boot" / name
            ).read_bytes()

    def test_rerun_is_byte_identical(self, rotated_files, tmp_path):
        assert run_align(rotated_files, tmp_path / "a") == 0
        assert run_align(rotated_files, tmp_path / "b") == 0
        for name in ("source_mapped.vec", "target_normalized.vec", "alignment.map"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestRefine:
    def aligned(self, rotated_files, tmp_path):
        out = tmp_path / "aligned"
        assert run_align(rotated_files, out) == 0
        return out

    def test_outputs_and_positive_shift(self, rotated_files, tmp_path, capsys):
        aligned = self.aligned(rotated_files, tmp_path)
        code = main(
            [
                "refine",
                "--src", str(aligned / "source_mapped.vec"),
                "--tgt", str(aligned / "target_normalized.vec"),
                "--dict", str(rotated_files["dict"]),
                "--out", str(tmp_path / "refined"),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        mean_delta = float(out.split("mean_delta")[1].split()[0])
        assert mean_delta > 0.0
        for name in (
            "source_refined.vec",
            "target_refined.vec",
            "meemi.model",
            "meemi.src.map",
            "meemi.tgt.map",
        ):
            assert (tmp_path / "refined" / name).exists()

    def test_zero_coverage_dict_is_data_error(self, rotated_files, tmp_path):
        aligned = self.aligned(rotated_files, tmp_path)
        bad_dict = tmp_path / "bad.dict"
        bad_dict.write_text("ghost phantom\n")
        code = main(
            [
                "refine",
                "--src", str(aligned / "source_mapped.vec"),
                "--tgt", str(aligned / "target_normalized.vec"),
                "--dict", str(bad_dict),
                "--out", str(tmp_path / "refined"),
            ]
        )
        assert code == 1

    def test_rerun_byte_identical(self, rotated_files, tmp_path):
        aligned = self.aligned(rotated_files, tmp_path)
        args = [
            "refine",
            "--src", str(aligned / "source_mapped.vec"),
            "--tgt", str(aligned / "target_normalized.vec"),
            "--dict", str(rotated_files["dict"]),
        ]
        assert main(args + ["--out", str(tmp_path / "r1")]) == 0
        assert main(args + ["--out", str(tmp_path / "r2")]) == 0
        for name in ("source_refined.vec", "target_refined.vec", "meemi.src.map"):
            assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()

    def test_cli_equals_library_composition(self, rotated_files, tmp_path):
        aligned_dir = self.aligned(rotated_files, tmp_path)
        code = main(
            [
                "refine",
                "--src", str(aligned_dir / "source_mapped.vec"),
                "--tgt", str(aligned_dir / "target_normalized.vec"),
                "--dict", str(rotated_files["dict"]),
                "--out", str(tmp_path / "refined"),
            ]
        )
        assert code == 0
        src = load_space(rotated_files["src"])
        tgt = load_space(rotated_files["tgt"])
        lexicon = load_lexicon(rotated_files["dict"])
        pair = align_supervised(src, tgt, lexicon)
        refined = apply_meemi(fit_meemi(pair, lexicon), pair)
        from_cli = load_space(tmp_path / "refined" / "source_refined.vec")
        assert from_cli.vocab == refined.source.vocab
        assert np.array_equal(from_cli.matrix, refined.source.matrix)


class TestInduce:
    def test_writes_dictionary(self, rotated_files, tmp_path):
        aligned = tmp_path / "aligned"
        assert run_align(rotated_files, aligned) == 0
        out_file = tmp_path / "induced.dict"
        code = main(
            [
                "induce",
                "--src", str(aligned / "source_mapped.vec"),
                "--tgt", str(aligned / "target_normalized.vec"),
                "--cap", "50",
                "--out", str(out_file),
            ]
        )
        assert code == 0
        assert len(out_file.read_text().splitlines()) == 50


class TestEval:
    def test_bli_reports_requested_ranks(self, rotated_files, tmp_path, capsys):
        aligned = tmp_path / "aligned"
        assert run_align(rotated_files, aligned) == 0
        code = main(
            [
                "eval", "bli",
                "--src", str(aligned / "source_mapped.vec"),
                "--tgt", str(aligned / "target_normalized.vec"),
                "--test", str(rotated_files["dict"]),
                "--k", "1,5,10",
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        for key in ("P@1", "P@5", "P@10"):
            assert key in out

    def test_bli_report_file(self, rotated_files, tmp_path):
        aligned = tmp_path / "aligned"
        assert run_align(rotated_files, aligned) == 0
        report_path = tmp_path / "report.tsv"
        code = main(
            [
                "eval", "bli",
                "--src", str(aligned / "source_mapped.vec"),
                "--tgt", str(aligned / "target_normalized.vec"),
                "--test", str(rotated_files["dict"]),
                "--format", "tsv",
                "--out", str(report_path),
            ]
        )
        assert code == 0
        assert "P@1\t" in report_path.read_text()

    def test_sim_monolingual(self, tmp_path, capsys):
        space = EmbeddingSpace(
            ["a", "b", "c"], np.array([[1.0, 0.0], [0.8, 0.6], [0.0, 1.0]])
        )
        vec = tmp_path / "mono.vec"
        save_space(space, vec)
        data = tmp_path / "sim.txt"
        data.write_text("a b 9\na c 2\nb c 5\n")
        code = main(["eval", "sim", "--src", str(vec), "--dataset", str(data)])
        assert code == 0
        out = capsys.readouterr().out
        assert "pearson_r" in out and "spearman_rho" in out

    def test_sim_cross_requires_tgt(self, tmp_path):
        vec = tmp_path / "mono.vec"
        save_space(EmbeddingSpace(["a", "b"], np.eye(2)), vec)
        data = tmp_path / "sim.txt"
        data.write_text("a b 1\nb a 2\n")
        code = main(
            ["eval", "sim", "--src", str(vec), "--dataset", str(data), "--cross"]
        )
        assert code == 2

    def test_hyper(self, tmp_path, capsys):
        code = main(
            ["fixture", "taxonomy", "--vocab", "120", "--dim", "10", "--seed", "7",
             "--out", str(tmp_path / "tax")]
        )
        assert code == 0
        code = main(
            [
                "eval", "hyper",
                "--src", str(tmp_path / "tax" / "space.vec"),
                "--train", str(tmp_path / "tax" / "train.tsv"),
                "--test", str(tmp_path / "tax" / "test.tsv"),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        for key in ("MRR", "MAP", "P@5"):
            assert key in out


class TestInspect:
    def test_dictionary_word_translates_to_counterpart(self, rotated_files, tmp_path, capsys):
        aligned = tmp_path / "aligned"
        assert run_align(rotated_files, aligned) == 0
        capsys.readouterr()
        code = main(
            [
                "inspect", "src00003",
                "--src", str(aligned / "source_mapped.vec"),
                "--tgt", str(aligned / "target_normalized.vec"),
                "--k", "3",
            ]
        )
        assert code == 0
        first = capsys.readouterr().out.splitlines()[0]
        assert first.split("\t")[1] == "tgt00003"

    def test_zero_k_is_usage_error(self, rotated_files):
        code = main(
            ["inspect", "src00003", "--src", str(rotated_files["src"]), "--k", "0"]
        )
        assert code == 2

    def test_oov_word_is_data_error(self, rotated_files, capsys):
        code = main(
            ["inspect", "zzz", "--src", str(rotated_files["src"]), "--k", "3"]
        )
        assert code == 1
        assert "zzz" in capsys.readouterr().err

    def test_within_space_drops_query_itself(self, rotated_files, capsys):
        code = main(
            ["inspect", "src00003", "--src", str(rotated_files["src"]), "--k", "2"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "src00003" not in out


class TestConfigFile:
    def test_config_supplies_defaults_flags_override(self, rotated_files, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text(
            f"src={rotated_files['src']}\n"
            f"tgt={rotated_files['tgt']}\n"
            f"dict={rotated_files['dict']}\n"
            "max-iter=7\n"
        )
        code = main(
            ["align", "--config", str(config), "--out", str(tmp_path / "out")]
        )
        assert code == 0
        assert (tmp_path / "out" / "alignment.map").exists()

    def test_bad_config_line_is_usage_error(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("not a key value line\n")
        code = main(["align", "--config", str(config), "--out", str(tmp_path / "o")])
        assert code == 2


class TestFixtureCommand:
    def test_rotated_files(self, rotated_files):
        for path in rotated_files.values():
            assert path.exists()

    def test_hub_files(self, tmp_path):
        code = main(["fixture", "hub", "--seed", "1", "--out", str(tmp_path / "hub")])
        assert code == 0
        for name in ("targets.vec", "queries.vec", "gold.dict"):
            assert (tmp_path / "hub" / name).exists()

    def test_fixture_deterministic(self, tmp_path):
        for sub in ("a", "b"):
            assert main(
                ["fixture", "rotated", "--vocab", "50", "--dim", "8", "--seed", "5",
                 "--out", str(tmp_path / sub)]
            ) == 0
        assert (tmp_path / "a" / "src.vec").read_bytes() == (tmp_path / "b" / "src.vec").read_bytes()

    def test_unknown_command_usage_error(self):
        assert main(["frobnicate"]) == 2
