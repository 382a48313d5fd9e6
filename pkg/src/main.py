"""
eps-normcrm - Main Entry Point

    python src/main.py run --config config/simulated_a5.yaml
    python src/main.py eppf-check --intensity gamma --kappa 1 --eps 1e-8 --nmax 5
"""

import logging
import sys
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

sys.path.insert(0, str(Path(__file__).parent))

from config import settings  # noqa: E402
from cli import main as cli_main  # noqa: E402


def main() -> int:
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
