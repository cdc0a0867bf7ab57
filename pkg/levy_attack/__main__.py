"""Allow `python -m levy_attack`."""
import sys

from .cli import main

sys.exit(main())
