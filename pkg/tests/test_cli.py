import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from conftest import mixed_map
from fst.cli import main
from fst.io import REPORT_SCHEMA, read_any, read_image, write_fmap, write_image
from fst.metrics import ssim
from fst.spectral import dft, spectral_gram


def _run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_default(capsys):
    code, out, _ = _run(["verify"], capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert all(c["passed"] for c in doc["checks"])
    code2, out2, _ = _run(["verify"], capsys)
    assert out2 == out


def test_verify_report_file_and_fault(tmp_path, capsys):
    code, out, _ = _run(["verify", "--report", tmp_path / "r.json", "--seed", 3], capsys)
    assert code == 0
    jsonschema.validate(json.loads((tmp_path / "r.json").read_text()), REPORT_SCHEMA)
    assert all(line.endswith("PASS") for line in out.splitlines())
    code, _, err = _run(["verify", "--inject-fault"], capsys)
    assert code == 1
    assert "domain_equivalence_wct" in err


def test_verify_entry_point_is_byte_deterministic():
    runs = [subprocess.run([sys.executable, "-m", "fst.cli", "verify"], capture_output=True)
            for _ in range(2)]
    assert runs[0].returncode == 0
    assert runs[0].stdout == runs[1].stdout


@pytest.mark.parametrize("method", ["adain", "wct", "optimal", "gram-opt"])
def test_stylize_identity(tmp_path, capsys, rng, method):
    f = mixed_map(rng, 3, 12, 10)
    write_fmap(f, tmp_path / "c.fmap")
    code, _, _ = _run(["stylize", "--content", tmp_path / "c.fmap", "--style", tmp_path / "c.fmap",
                       "--method", method, "-o", tmp_path / "o.fmap"], capsys)
    assert code == 0
    assert np.abs(read_any(tmp_path / "o.fmap") - f).max() <= 1e-6


def test_stylize_adain_domains_agree(tmp_path, capsys, rng):
    write_fmap(mixed_map(rng, 3, 16, 16) * 40 + 100, tmp_path / "c.fmap")
    write_fmap(mixed_map(rng, 3, 12, 20) * 30 + 90, tmp_path / "s.fmap")
    outs = []
    for domain in ("spatial", "frequency"):
        code, _, _ = _run(["stylize", "--content", tmp_path / "c.fmap", "--style", tmp_path / "s.fmap",
                           "--method", "adain", "--domain", domain, "-o", tmp_path / f"{domain}.fmap"],
                          capsys)
        assert code == 0
        outs.append(read_any(tmp_path / f"{domain}.fmap"))
    assert np.abs(outs[0] - outs[1]).max() <= 1e-6


def test_stylize_images_with_report_and_figures(tmp_path, capsys):
    from fst.corpus import desk_corpus
    c, s = desk_corpus(1)[0]
    write_image(c, tmp_path / "c.png")
    write_image(s, tmp_path / "s.ppm")
    code, out, _ = _run(["stylize", "--content", tmp_path / "c.png", "--style", tmp_path / "s.ppm",
                         "--method", "wct", "--phase-replace", "--fc-sigma", "0.5",
                         "-o", tmp_path / "out.png", "--report", tmp_path / "r.json",
                         "--figures", tmp_path / "figs", "--timings"], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    names = {c["name"] for c in doc["checks"]}
    assert {"domain_equivalence_wct", "mean_alignment_wct", "covariance_alignment_wct",
            "pr_content_loss_reduction"} <= names
    assert all(c["passed"] for c in doc["checks"])
    assert doc["timings"]
    assert len(out.splitlines()) == len(doc["checks"])
    assert read_image(tmp_path / "out.png").shape == (3, 64, 64)
    for stem in ("out_panel", "out_spectrum", "out_checks"):
        assert (tmp_path / "figs" / f"{stem}.png").read_bytes()[:4] == b"\x89PNG"


def test_exit_codes(tmp_path, capsys, rng):
    code, _, err = _run(["stylize", "--content", tmp_path / "none.png", "--style",
                         tmp_path / "none.png", "-o", tmp_path / "o.png"], capsys)
    assert code == 2 and err.startswith("fst:")
    (tmp_path / "junk.png").write_text("not an image")
    code, _, _ = _run(["stylize", "--content", tmp_path / "junk.png", "--style",
                       tmp_path / "junk.png", "-o", tmp_path / "o.png"], capsys)
    assert code == 2
    flat = mixed_map(rng, 2, 6, 6)
    flat[0] = 1.0
    write_fmap(flat, tmp_path / "flat.fmap")
    write_fmap(mixed_map(rng, 2, 6, 6), tmp_path / "s.fmap")
    code, _, err = _run(["stylize", "--content", tmp_path / "flat.fmap", "--style",
                         tmp_path / "s.fmap", "--method", "adain", "-o", tmp_path / "o.fmap"], capsys)
    assert code == 3 and "numerical" in err
    write_fmap(mixed_map(rng, 3, 6, 6), tmp_path / "s3.fmap")
    code, _, _ = _run(["stylize", "--content", tmp_path / "s.fmap", "--style",
                       tmp_path / "s3.fmap", "-o", tmp_path / "o.fmap"], capsys)
    assert code == 2


def test_blend_and_sigma_are_exclusive(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["stylize", "--content", "a", "--style", "b", "-o", "c",
              "--fc-sigma", "1", "--blend-alpha", "0.5"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["stylize", "--content", "a", "--style", "b", "-o", "c", "--blend-alpha", "1.5"])
    capsys.readouterr()


def _textures(rng):
    yy, xx = np.mgrid[0:48, 0:48]
    a = 128 + 80 * np.sin(xx / 3.0) * (yy > 20)
    b = 128 + 60 * np.cos((xx + yy) / 5.0) + 20 * rng.standard_normal((48, 48))
    return a[None], b[None]


def test_spectrum_swap_phase(tmp_path, capsys, rng):
    a, b = _textures(rng)
    write_image(a, tmp_path / "a.png")
    write_image(b, tmp_path / "b.png")
    code, _, _ = _run(["spectrum", tmp_path / "a.png", "--swap", "phase", "--with", tmp_path / "b.png",
                       "-o", tmp_path / "o.fmap"], capsys)
    assert code == 0
    out = read_any(tmp_path / "o.fmap")
    a, b = read_image(tmp_path / "a.png"), read_image(tmp_path / "b.png")
    # the result takes b's phase and a's amplitude
    assert ssim(out, b) > ssim(out, a)


def test_spectrum_swap_amplitude(tmp_path, capsys, rng):
    a, b = mixed_map(rng, 2, 9, 10), mixed_map(rng, 2, 9, 10)
    write_fmap(a, tmp_path / "a.fmap")
    write_fmap(b, tmp_path / "b.fmap")
    code, out, _ = _run(["spectrum", tmp_path / "a.fmap", "--swap", "amplitude",
                         "--with", tmp_path / "b.fmap", "-o", tmp_path / "o.fmap"], capsys)
    assert code == 0
    res = read_any(tmp_path / "o.fmap")
    g_out, g_b = np.diag(spectral_gram(dft(res))), np.diag(spectral_gram(dft(b)))
    assert np.abs(g_out - g_b).max() <= 1e-6 * np.abs(g_b).max()
    assert out.splitlines()[0].startswith("gram_diag_out\t")
    code, _, _ = _run(["spectrum", tmp_path / "a.fmap", "--swap", "amplitude"], capsys)
    assert code == 2


def test_spectrum_views_of_constant(tmp_path, capsys):
    write_image(np.full((3, 8, 8), 90.0), tmp_path / "flat.png")
    code, _, _ = _run(["spectrum", tmp_path / "flat.png", "--out-dir", tmp_path / "v",
                       "--figure", tmp_path / "spec.png"], capsys)
    assert code == 0
    amp = read_image(tmp_path / "v" / "amplitude_c0.png")
    assert amp.shape == (1, 8, 8)
    assert amp[0, 4, 4] == 255 and np.count_nonzero(amp) == 1
    assert (tmp_path / "v" / "phase_c2.png").exists()
    assert (tmp_path / "spec.png").exists()


def test_corpus_command(tmp_path, capsys):
    code, _, _ = _run(["corpus", tmp_path / "corpus"], capsys)
    assert code == 0
    files = sorted(p.name for p in (tmp_path / "corpus").iterdir())
    assert len(files) == 40 and files[0] == "content_00.png"
