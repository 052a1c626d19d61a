from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Load .env file if it exists
try:
    from dotenv import load_dotenv
    load_dotenv(project_root / ".env")
except ImportError:
    pass

from src.config import load_config
from src.pipeline.runner import print_sweep, run_bound_sweep
from src.utils.logs import setup_logging
from src.utils.tracker import RunTracker


def main():
    parser = argparse.ArgumentParser(description="Tabulate Delsarte and triple bounds on A(n, d).")
    parser.add_argument("--config", type=Path, default=Path("configs/default.yaml"))
    parser.add_argument("--log-level", default="INFO")
    args = parser.parse_args()

    setup_logging(args.log_level)
    config = load_config(args.config)
    tracker = RunTracker()
    df = run_bound_sweep(config, tracker=tracker)
    print_sweep(df)
    print(json.dumps(tracker.get_stats(), indent=2))


if __name__ == "__main__":
    main()
