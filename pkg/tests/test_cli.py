"""End-to-end command tests through main(argv); exit codes are the contract."""

import pytest

from conetower.cli import main

INT_MANIFEST = "[category]\nmode = integer\n"
F2_MANIFEST = "[category]\nmode = field\np = 2\ndim = 1\nunit = [1]\n"


def cx(m: int) -> str:
    return f"[complex]\n[module]\n-1 = 1\n0 = 1\n[d -1]\n[{m}]\n"


K0 = "[complex]\n[module]\n0 = 1\n"
K1 = "[complex]\n[module]\n-1 = 1\n"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return tmp_path, write


def test_member_detects_and_writes_certificate(files, capsys):
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    y = write("C4.cx", cx(4))
    g = write("C2.cx", cx(2))
    out = str(tmp / "report.txt")
    cert = str(tmp / "c.cert")
    code = main(["member", "-m", m, "-t", y, "-g", g, "--max-stages", "4", "--out", out, "--cert", cert])
    assert code == 0
    report = (tmp / "report.txt").read_text()
    assert "verdict = member" in report
    assert "stage = 2" in report
    # every emitted document embeds digest, config, and tool version
    assert "manifest_digest = " in report
    assert "max_stages = 4" in report
    assert "version = " in report
    assert "seed = 0" in report
    assert (tmp / "c.cert").exists()
    assert "manifest_digest = " in (tmp / "c.cert").read_text()
    ver = main(["verify", "-m", m, "-t", y, "-g", g, "--certificate", cert])
    assert ver == 0


def test_member_undetermined_exit_10(files):
    tmp, write = files
    m = write("f2.cat", F2_MANIFEST)
    y = write("k1.cx", K1)
    g = write("k0.cx", K0)
    code = main(["member", "-m", m, "-t", y, "-g", g, "--max-stages", "4"])
    assert code == 10


def test_malformed_complex_exit_2(files, capsys):
    tmp, write = files
    m = write("f2.cat", F2_MANIFEST)
    y = write("bad.cx", "[complex]\n[module]\n0 = 1\n1 = 1\n2 = 1\n[d 0]\n[1]\n[d 1]\n[1]\n")
    g = write("k0.cx", K0)
    code = main(["member", "-m", m, "-t", y, "-g", g])
    assert code == 2


def test_nonprime_manifest_exit_2(files):
    tmp, write = files
    m = write("bad.cat", F2_MANIFEST.replace("p = 2", "p = 4"))
    y = write("k0.cx", K0)
    code = main(["member", "-m", m, "-t", y, "-g", y])
    assert code == 2


def test_verify_rejects_tamper_and_wrong_target(files, capsys):
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    y = write("C4.cx", cx(4))
    y6 = write("C6.cx", cx(6))
    g = write("C2.cx", cx(2))
    cert = str(tmp / "c.cert")
    assert main(["member", "-m", m, "-t", y, "-g", g, "--cert", cert, "--out", str(tmp / "r.txt")]) == 0
    text = (tmp / "c.cert").read_text()
    lines = text.splitlines()
    for i, line in enumerate(lines):
        s = line.strip()
        if s.startswith("[") and len(s) > 2 and (s[1].isdigit() or s[1] in "-("):
            inner = s[1:-1].split(",")
            inner[0] = str(int(inner[0]) + 1)
            lines[i] = "[" + ",".join(inner) + "]"
            break
    (tmp / "bad.cert").write_text("\n".join(lines) + "\n")
    assert main(["verify", "-m", m, "-t", y, "-g", g, "--certificate", str(tmp / "bad.cert")]) == 3
    assert main(["verify", "-m", m, "-t", y6, "-g", g, "--certificate", cert]) == 3


def test_member_determinism_byte_identical(files):
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    y = write("C4.cx", cx(4))
    g = write("C2.cx", cx(2))
    out = str(tmp / "r.txt")
    cert = str(tmp / "c.cert")
    assert main(["member", "-m", m, "-t", y, "-g", g, "--out", out, "--cert", cert]) == 0
    first = ((tmp / "r.txt").read_bytes(), (tmp / "c.cert").read_bytes())
    assert main(["member", "-m", m, "-t", y, "-g", g, "--out", out, "--cert", cert]) == 0
    second = ((tmp / "r.txt").read_bytes(), (tmp / "c.cert").read_bytes())
    assert first == second


def test_local_member_and_local_global(files):
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    y = write("C6.cx", cx(6))
    g = write("C2.cx", cx(2))
    out = str(tmp / "r.txt")
    assert main(["member", "-m", m, "-t", y, "-g", g, "--prime", "2", "--out", out, "--cert", str(tmp / "c.cert")]) == 0
    assert main(["member", "-m", m, "-t", y, "-g", g, "--prime", "3", "--out", out]) == 10
    lg = str(tmp / "lg.txt")
    assert main(["local-global", "-m", m, "-t", y, "-g", g, "--max-stages", "4", "--out", lg]) == 0
    text = (tmp / "lg.txt").read_text()
    assert "primes = [2, 3]" in text
    assert "[local 2]" in text and "[local 3]" in text


def test_local_global_rejects_field_mode(files):
    tmp, write = files
    m = write("f2.cat", F2_MANIFEST)
    y = write("k0.cx", K0)
    assert main(["local-global", "-m", m, "-t", y, "-g", y]) == 2


def test_oracle_exit_codes(files):
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    y = write("C4.cx", cx(4))
    g = write("C2.cx", cx(2))
    assert main(["oracle", "-m", m, "-t", y, "-g", g]) == 0
    k1 = write("k1.cx", K1)
    k0 = write("k0.cx", K0)
    f2 = write("f2.cat", F2_MANIFEST)
    assert main(["oracle", "-m", f2, "-t", k1, "-g", k0]) == 10


def test_hom_cone_contract(files, capsys, tmp_path):
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    a = write("C2.cx", cx(2))
    b = write("C3.cx", cx(3))
    assert main(["hom", "-m", m, "-s", a, "-t", b]) == 0
    out = capsys.readouterr().out
    assert "hom = 0" in out

    # cone of 2: Z[0] -> Z[0] equals the C(2) document
    z0 = write("Z0.cx", K0)
    f = write("two.map", "[map]\n[component 0]\n[2]\n")
    cone_out = str(tmp / "cone.cx")
    assert main(["cone", "-m", m, "-s", z0, "-t", z0, "-f", f, "--out", cone_out]) == 0
    text = (tmp / "cone.cx").read_text()
    assert "[d -1]" in text and "[2]" in text

    contractible = write("contr.cx", "[complex]\n[module]\n-1 = 1\n0 = 1\n[d -1]\n[1]\n")
    assert main(["contract", "-m", m, "-c", contractible]) == 0
    assert main(["contract", "-m", m, "-c", a]) == 10


def test_functor_table(files, capsys):
    tmp, write = files
    m = write("f2.cat", F2_MANIFEST)
    y = write("k0.cx", K0)
    assert main(["functor-table", "-m", m, "-t", y, "-g", y, "--max-stages", "2"]) == 0
    out = capsys.readouterr().out
    assert "[cell 0 0]" in out
    assert "connecting_zero = true" in out


def test_missing_generator_exit_2(files):
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    y = write("C4.cx", cx(4))
    assert main(["member", "-m", m, "-t", y]) == 2


def test_bad_flags_exit_2(files):
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    y = write("C4.cx", cx(4))
    g = write("C2.cx", cx(2))
    assert main(["member", "-m", m, "-t", y, "-g", g, "--max-stages", "0"]) == 2
    assert main(["member", "-m", m, "-t", y, "-g", g, "--prime", "6"]) == 2
    assert main(["local-global", "-m", m, "-t", y, "-g", g, "--primes", "2,4"]) == 2


def test_stage_zero_certificate_roundtrip(files):
    # a contractible target is a member at stage 0 with an empty tower
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    y = write("contr.cx", cx(1))
    g = write("C2.cx", cx(2))
    cert = str(tmp / "c.cert")
    assert main(["member", "-m", m, "-t", y, "-g", g, "--out", str(tmp / "r.txt"), "--cert", cert]) == 0
    assert "stage = 0" in (tmp / "r.txt").read_text()
    assert main(["verify", "-m", m, "-t", y, "-g", g, "--certificate", cert]) == 0


def test_local_certificate_roundtrip(files):
    # C(6) is 5-locally zero: member at stage 0 with multiplier 6
    tmp, write = files
    m = write("int.cat", INT_MANIFEST)
    y = write("C6.cx", cx(6))
    g = write("C2.cx", cx(2))
    cert = str(tmp / "c.cert")
    assert main(["member", "-m", m, "-t", y, "-g", g, "--prime", "5",
                 "--out", str(tmp / "r.txt"), "--cert", cert]) == 0
    text = (tmp / "c.cert").read_text()
    assert "mode = local" in text and "prime = 5" in text and "multiplier = 6" in text
    assert main(["verify", "-m", m, "-t", y, "-g", g, "--certificate", cert]) == 0
    # a multiplier not coprime to the prime must be rejected
    bad = text.replace("multiplier = 6", "multiplier = 5")
    (tmp / "bad.cert").write_text(bad)
    assert main(["verify", "-m", m, "-t", y, "-g", g, "--certificate", str(tmp / "bad.cert")]) == 3
