"""Regenerate the packaged library file from the checked standard library.

Run as `python -m reltt.gen_prelude`. The output is deterministic; the test
suite asserts the packaged file matches a fresh export byte for byte.
"""

from pathlib import Path

from .script import export_prelude


def main() -> None:
    target = Path(__file__).resolve().parent / "prelude.rtt"
    target.write_text(export_prelude(), "utf-8")
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
