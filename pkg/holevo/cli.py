"""
Console entry point: `holevo <command> [args]` runs the matching management command.

Returns the process exit code (0 success, 2 parse or shape errors, 3 infeasible or
numerical failures, 4 resource caps).
"""

import os
import sys

from dotenv import load_dotenv


def run(argv=None) -> int:
    load_dotenv()
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "core.settings")
    from django.core.management import execute_from_command_line  # noqa: PLC0415

    args = list(sys.argv[1:] if argv is None else argv)
    try:
        execute_from_command_line(["holevo", *args])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
