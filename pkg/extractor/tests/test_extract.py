import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image

import respstats
from nrsm_extract import ExtractionSpec, ToyNet, available_layers, extract
from nrsm_extract.cli import main as cli_main


@pytest.fixture(scope="module")
def image_folder(tmp_path_factory):
    folder = tmp_path_factory.mktemp("images")
    rng = np.random.default_rng(42)
    for i in range(10):
        # distinct structured content per image
        base = np.linspace(0, 255, 32 * 32, dtype=np.float64).reshape(32, 32)
        noise = rng.integers(0, 80, size=(32, 32, 3))
        pixels = np.clip(base[:, :, None] * (0.3 + 0.07 * i) + noise, 0, 255).astype(np.uint8)
        Image.fromarray(pixels, "RGB").save(folder / f"img_{i:02d}.png")
    return folder


def run_extract(image_folder, out_dir, layers=("conv1", "fc2", "softmax"), prefix="act"):
    spec = ExtractionSpec(
        model="toy",
        layers=layers,
        image_dir=image_folder,
        out_prefix=str(out_dir / prefix),
        resize=(64, 64),
    )
    return extract(spec)


class TestExtraction:
    def test_shapes_load_in_matrix_core(self, image_folder, tmp_path):
        paths = run_extract(image_folder, tmp_path)
        model = ToyNet()
        conv1_units = 8 * 31 * 31  # (64 - 3)//2 + 1 = 31 per spatial side
        expected = {"conv1": conv1_units, "fc2": 10, "softmax": 10}
        for layer, path in paths.items():
            m = respstats.load_matrix(path)
            assert m.shape == (10, expected[layer])
            sidecar = json.loads(Path(str(path)[: -len(".nrsm")] + ".json").read_text())
            assert sidecar["shape"] == [10, expected[layer]]
            assert sidecar["rows"] == [f"img_{i:02d}.png" for i in range(10)]
            assert sidecar["model"] == "toy"

    def test_softmax_rows_sum_to_one(self, image_folder, tmp_path):
        paths = run_extract(image_folder, tmp_path, layers=("softmax",))
        m = respstats.load_matrix(paths["softmax"])
        assert np.max(np.abs(m.values.sum(axis=1) - 1.0)) < 1e-5
        assert np.all(m.values >= 0)

    def test_two_runs_byte_identical(self, image_folder, tmp_path):
        a = run_extract(image_folder, tmp_path / "a", prefix="run")
        b = run_extract(image_folder, tmp_path / "b", prefix="run")
        for layer in a:
            assert Path(a[layer]).read_bytes() == Path(b[layer]).read_bytes()

    def test_row_order_follows_sorted_filenames(self, image_folder, tmp_path):
        paths = run_extract(image_folder, tmp_path, layers=("fc2",))
        full = respstats.load_matrix(paths["fc2"]).values
        # re-extract from a folder holding only the lexicographically last image
        solo_dir = tmp_path / "solo"
        solo_dir.mkdir()
        src = sorted(image_folder.iterdir())[-1]
        (solo_dir / src.name).write_bytes(src.read_bytes())
        solo = extract(
            ExtractionSpec(
                model="toy", layers=("fc2",), image_dir=solo_dir,
                out_prefix=str(tmp_path / "solo_act"), resize=(64, 64),
            )
        )
        solo_values = respstats.load_matrix(solo["fc2"]).values
        assert np.allclose(full[-1], solo_values[0], atol=1e-12)

    def test_unknown_layer_lists_available(self, image_folder, tmp_path):
        with pytest.raises(ValueError, match="available"):
            run_extract(image_folder, tmp_path, layers=("conv9",))

    def test_undecodable_image_skipped_and_recorded(self, image_folder, tmp_path):
        folder = tmp_path / "mixed"
        folder.mkdir()
        for src in sorted(image_folder.iterdir())[:3]:
            (folder / src.name).write_bytes(src.read_bytes())
        (folder / "broken.png").write_bytes(b"not an image at all")
        with pytest.warns(UserWarning, match="broken.png"):
            paths = extract(
                ExtractionSpec(
                    model="toy", layers=("fc2",), image_dir=folder,
                    out_prefix=str(tmp_path / "mixed_act"), resize=(64, 64),
                )
            )
        m = respstats.load_matrix(paths["fc2"])
        assert m.n_stimuli == 3
        sidecar = json.loads((tmp_path / "mixed_act_fc2.json").read_text())
        assert sidecar["skipped"] == ["broken.png"]

    def test_empty_folder_rejected(self, tmp_path):
        folder = tmp_path / "empty"
        folder.mkdir()
        with pytest.raises(ValueError, match="no image files"):
            extract(
                ExtractionSpec(
                    model="toy", layers=("fc2",), image_dir=folder,
                    out_prefix=str(tmp_path / "x"),
                )
            )

    def test_available_layers_listing(self):
        names = available_layers(ToyNet())
        assert {"conv1", "conv2", "fc1", "fc2", "softmax"} <= set(names)

    def test_torchvision_model_with_local_weights(self, image_folder, tmp_path):
        torchvision = pytest.importorskip("torchvision")
        import torch

        model = torchvision.models.get_model("squeezenet1_1", weights=None)
        weights_path = tmp_path / "sq.pth"
        torch.save(model.state_dict(), weights_path)
        paths = extract(
            ExtractionSpec(
                model="tv:squeezenet1_1", layers=("classifier",),
                image_dir=image_folder, out_prefix=str(tmp_path / "tv_act"),
                resize=(64, 64), weights=str(weights_path),
            )
        )
        m = respstats.load_matrix(paths["classifier"])
        assert m.shape == (10, 1000)

    def test_unknown_model_id(self, image_folder, tmp_path):
        with pytest.raises(ValueError, match="unknown model id"):
            extract(
                ExtractionSpec(
                    model="mystery", layers=("fc2",), image_dir=image_folder,
                    out_prefix=str(tmp_path / "x"),
                )
            )


class TestCli:
    def test_end_to_end(self, image_folder, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            cli_main,
            ["--model", "toy", "--layers", "fc1,softmax", "--images", str(image_folder),
             "--out", str(tmp_path / "cli_act"), "--resize", "64"],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output
        m = respstats.load_matrix(tmp_path / "cli_act_fc1.nrsm")
        assert m.shape == (10, 32)

    def test_bad_layer_exit_code(self, image_folder, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            cli_main,
            ["--model", "toy", "--layers", "nope", "--images", str(image_folder),
             "--out", str(tmp_path / "cli_act")],
        )
        assert result.exit_code == 1
        assert "available" in result.output
