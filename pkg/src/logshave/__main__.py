"""``python -m logshave`` entry point."""
from .cli import main

raise SystemExit(main())
