"""
Exact error and error bounds of a fixed codebook.

Pure letters get the square-root measurement suite (exact error, tight, coarse and
modified bounds); every channel gets the projected mixed-state rule and its estimate.

Usage:
    python manage.py bounds channel.json --codebook code.json
    python manage.py bounds channel.json --codebook code.json --delta 0.2
"""

import logging

from holevo.quantum.channel import ensemble_average
from holevo.quantum.coding import (
    average_error,
    coarse_bound,
    coarse_bound_trace,
    decode_mixed,
    gram,
    projected_srm,
    srm,
    srm_error,
    tight_bound,
    typical_projector,
)
from holevo.quantum.errors import DegenerateInputError
from holevo.serializers import load_codebook

from ._base import HolevoCommand

logger = logging.getLogger(__name__)


class Command(HolevoCommand):
    help = "Evaluate decoding errors and bounds for a codebook"

    def add_options(self, parser):
        parser.add_argument("--codebook", type=str, required=True, help="Path to a holevo.codebook/v1 JSON file")
        parser.add_argument("--delta", type=float, default=0.3, help="Typical window width in bits (default: 0.3)")

    def compute(self, options):
        spec = self.load(options)
        ch = spec.channel
        prior = self.prior_for(spec)
        codebook = load_codebook(options["codebook"])
        delta = options["delta"]
        outputs = {}
        units = {}

        if ch.is_pure:
            data = gram(ch, codebook)
            typical = typical_projector(ensemble_average(ch, prior), codebook.n, delta)
            projected = projected_srm(ch, codebook, typical, allow_degenerate=True)
            outputs.update(
                {
                    "srm_error": average_error(ch, codebook, srm(ch, codebook)),
                    "srm_error_gram": srm_error(data),
                    "tight_bound": tight_bound(data),
                    "coarse_bound": coarse_bound(data),
                    "coarse_bound_trace": coarse_bound_trace(ch, codebook),
                    "projected_srm_error": projected.exact_error,
                    "modified_bound": projected.modified_bound,
                    "modified_bound_trace": projected.modified_bound_trace,
                    "typical_leakage": typical.leakage,
                    "typical_empty": typical.empty,
                }
            )
            units.update(
                {
                    "srm_error": "probability",
                    "srm_error_gram": "probability",
                    "tight_bound": "probability",
                    "coarse_bound": "probability",
                    "coarse_bound_trace": "probability",
                    "projected_srm_error": "probability",
                    "modified_bound": "probability",
                    "modified_bound_trace": "probability",
                    "typical_leakage": "probability",
                    "typical_empty": "flag",
                }
            )

        try:
            mixed = decode_mixed(ch, prior, codebook, delta)
        except DegenerateInputError:
            # pure letters still have the SRM suite to report
            if not ch.is_pure:
                raise
            logger.warning("Projected mixed-state rule is undefined for delta=%s", delta)
            mixed = None
        outputs["mixed_rule_available"] = mixed is not None
        units["mixed_rule_available"] = "flag"
        if mixed is not None:
            outputs.update({"mixed_rule_error": mixed.exact_error, "bound19": mixed.bound})
            units.update({"mixed_rule_error": "probability", "bound19": "probability"})

        inputs = {
            "spec": options["spec"],
            "codebook": options["codebook"],
            "delta": delta,
            "n": codebook.n,
            "M": codebook.M,
            "prior": prior.probabilities,
        }
        return self.record(inputs, outputs, units)
