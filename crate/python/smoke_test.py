"""Smoke test for the `jqt` Python module.

Build first:
    cargo build --release -p jqt-py --features extension-module
then run `python3 python/smoke_test.py`. If `jqt` is not installed, the
freshly built library in target/release is loaded instead.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile


def load():
    try:
        import jqt

        return jqt
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    built = root / "target" / "release" / "libjqt.so"
    if not built.exists():
        sys.exit(f"{built} not found; build the jqt-py crate first")
    tmp = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(built, tmp / "jqt.so")
    found = importlib.util.spec_from_file_location("jqt", tmp / "jqt.so")
    mod = importlib.util.module_from_spec(found)
    found.loader.exec_module(mod)
    return mod


def main():
    jqt = load()

    code, out, _ = jqt.run(["--q", "2", "cf", "--rational", "(T^2+1)/T"])
    assert code == 0 and out.strip() == "[T; T]", (code, out)

    r = jqt.call("jinv", q=2, cfrac="[0; | T]", eps="3,1")
    assert r["result"]["abs_log"] == 7, r["result"]

    r = jqt.call("jinv", q=2, rational="1/(T^2+T+1)", eps="4,1")
    assert r["result"]["kind"] == "infinity" and r["result"]["certified"], r["result"]

    r = jqt.call("weyl", q=2, cfrac="[0; | T]", dmax=6)
    assert r["result"]["constant"] is True and r["result"]["value"] == [0, 0], r["result"]

    try:
        jqt.call("cf", q=2, rational="1/0")
    except jqt.JqtError as e:
        assert e.args[1] == 4, e.args
    else:
        raise AssertionError("1/0 accepted")

    print(f"jqt {jqt.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
