from __future__ import annotations

import sys
from pathlib import Path

from dotenv import load_dotenv

ROOT = Path(__file__).resolve().parent
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from cli.lab import main as lab_main


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    return lab_main(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
