"""
Shared plumbing for the toolkit commands.

Every command reads its inputs, computes, and writes one JSON result record to
standard output. Toolkit errors become CommandError with the exit code of the
exception class (2 parse, 3 infeasible or numerical, 4 resource cap).
"""

import logging
from pathlib import Path

import pandas as pd
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from holevo.quantum.channel import Prior
from holevo.quantum.constants import max_threads
from holevo.quantum.errors import ToolkitError
from holevo.serializers import ChannelSpec, build_record, dump_record, load_channel_spec

logger = logging.getLogger(__name__)


class HolevoCommand(BaseCommand):
    requires_system_checks = []
    takes_spec = True

    def add_arguments(self, parser):
        if self.takes_spec:
            parser.add_argument("spec", type=str, help="Path to a holevo.channel/v1 JSON file")
        self.add_options(parser)

    def add_options(self, parser):
        """Command-specific flags."""

    def compute(self, options) -> dict:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            record = self.compute(options)
        except ToolkitError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        self.stdout.write(dump_record(record))

    @property
    def command_name(self) -> str:
        return self.__module__.rsplit(".", 1)[-1]

    def load(self, options) -> ChannelSpec:
        spec = load_channel_spec(options["spec"])
        logger.info("Loaded %r from %s", spec.channel, options["spec"])
        return spec

    @staticmethod
    def prior_for(spec: ChannelSpec) -> Prior:
        return spec.prior if spec.prior is not None else Prior.uniform(spec.channel.alphabet_size)

    @staticmethod
    def thread_count(options) -> int:
        return max(1, min(int(options.get("threads") or 1), max_threads()))

    def record(self, inputs, outputs, units, seed=None, table=None, table_units=None) -> dict:
        return build_record(
            command=self.command_name,
            inputs=inputs,
            outputs=outputs,
            units=units,
            version=settings.HOLEVO_VERSION,
            seed=seed,
            table=table,
            table_units=table_units,
        )

    def write_csv(self, frame: pd.DataFrame, path) -> None:
        frame.to_csv(Path(path), index=False)
        logger.info("Wrote %s rows to %s", len(frame), path)
