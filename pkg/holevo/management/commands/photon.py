"""
Capacity of the infinite-band photon channel, in nats per unit time.

Usage:
    python manage.py photon --noise 0.5 --energy 2
"""

from holevo.quantum.capacity import beta_from_noise, photon_capacity

from ._base import HolevoCommand


class Command(HolevoCommand):
    help = "Evaluate the closed-form photon channel capacity"
    takes_spec = False

    def add_options(self, parser):
        parser.add_argument("--noise", type=float, required=True, help="Mean noise energy N")
        parser.add_argument("--energy", type=float, required=True, help="Signal energy budget E")
        parser.add_argument("--hbar", type=float, default=1.0, help="Planck constant in the chosen units")

    def compute(self, options):
        noise, energy, hbar = options["noise"], options["energy"], options["hbar"]
        outputs = {
            "capacity": photon_capacity(noise, energy, hbar),
            "beta": beta_from_noise(noise, hbar),
        }
        units = {"capacity": "nats", "beta": "dimensionless"}
        return self.record({"noise": noise, "energy": energy, "hbar": hbar}, outputs, units)
