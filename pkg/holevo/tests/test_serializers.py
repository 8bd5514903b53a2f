import json
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from holevo.quantum.channel import Prior
from holevo.quantum.errors import InvalidStateError, InvariantViolationError, NotHermitianError, SpecParseError
from holevo.serializers import (
    CHANNEL_SCHEMA,
    build_record,
    channel_to_spec,
    dump_record,
    load_channel_spec,
    load_codebook,
    parse_channel_spec,
    round_significant,
)

from .utils import fixture_path, random_mixed_channel, random_pure_channel


def pure_spec(*amplitudes):
    return {
        "schema": CHANNEL_SCHEMA,
        "dim": len(amplitudes[0]),
        "states": [{"kind": "pure", "amplitudes": list(a)} for a in amplitudes],
    }


class ChannelSpecTests(SimpleTestCase):
    def test_pure_fixture(self):
        spec = load_channel_spec(fixture_path("overlap_pair.json"))
        assert spec.channel.is_pure
        assert spec.prior is None
        assert spec.costs.tolist() == [0.0, 1.0]
        assert np.isclose(spec.channel.overlaps[0, 1], 0.5)

    def test_classical_fixture(self):
        spec = load_channel_spec(fixture_path("bsc.json"))
        assert spec.channel.is_quasiclassical
        assert np.allclose(spec.channel.states[0].matrix, np.diag([0.9, 0.1]))

    def test_mixed_fixture(self):
        spec = load_channel_spec(fixture_path("mixed_pair.json"))
        assert spec.channel.pure_flags == (False, False)
        assert spec.prior.probabilities.tolist() == [0.5, 0.5]

    def test_real_amplitudes_are_accepted(self):
        spec = parse_channel_spec(pure_spec([1, 0], [0, 1]))
        assert spec.channel.is_pure

    def test_schema_is_checked(self):
        data = pure_spec([1, 0], [0, 1])
        data["schema"] = "holevo.channel/v0"
        with self.assertRaises(SpecParseError):
            parse_channel_spec(data)

    def test_dimension_is_checked(self):
        data = pure_spec([1, 0], [0, 1])
        data["dim"] = 3
        with self.assertRaises(SpecParseError):
            parse_channel_spec(data)

    def test_prior_length_is_checked(self):
        data = pure_spec([1, 0], [0, 1])
        data["prior"] = [1.0]
        with self.assertRaises(SpecParseError):
            parse_channel_spec(data)

    def test_bad_states(self):
        with self.assertRaises(InvalidStateError):
            parse_channel_spec(pure_spec([1, 1], [0, 1]))
        mixed = {
            "dim": 2,
            "states": [{"kind": "mixed", "matrix": [[0.5, 0.3], [0.0, 0.5]]}],
        }
        with self.assertRaises(NotHermitianError):
            parse_channel_spec(mixed)
        classical = {"dim": 2, "states": [{"kind": "classical", "column": [0.5, 0.6]}]}
        with self.assertRaises(SpecParseError):
            parse_channel_spec(classical)
        missing = {"dim": 2, "states": [{"kind": "pure", "matrix": [[1, 0], [0, 0]]}]}
        with self.assertRaises(SpecParseError):
            parse_channel_spec(missing)

    def test_unreadable_files(self):
        with tempfile.TemporaryDirectory() as directory:
            broken = Path(directory) / "broken.json"
            broken.write_text("{not json", encoding="utf-8")
            with self.assertRaises(SpecParseError):
                load_channel_spec(broken)
            with self.assertRaises(SpecParseError):
                load_channel_spec(Path(directory) / "missing.json")

    def test_round_trip(self):
        rng = np.random.default_rng(9)
        for ch in (random_pure_channel(rng, 3, 2), random_mixed_channel(rng, 2, 3)):
            spec = channel_to_spec(ch, Prior.uniform(ch.alphabet_size), costs=[0, 1, 2][: ch.alphabet_size])
            parsed = parse_channel_spec(json.loads(json.dumps(spec)))
            for original, restored in zip(ch.states, parsed.channel.states, strict=True):
                assert np.max(np.abs(original.matrix - restored.matrix)) <= 1e-12
            assert parsed.channel.pure_flags == ch.pure_flags
            assert np.allclose(parsed.prior.probabilities, 1 / ch.alphabet_size)


class CodebookFileTests(SimpleTestCase):
    def test_fixture(self):
        codebook = load_codebook(fixture_path("block_code.json"))
        assert codebook.M == 3
        assert codebook.n == 2

    def test_ragged_words(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "code.json"
            path.write_text(json.dumps({"words": [[0, 1], [1]]}), encoding="utf-8")
            with self.assertRaises(SpecParseError):
                load_codebook(path)


class ResultRecordTests(SimpleTestCase):
    def test_rounding(self):
        assert round_significant(0.12345678901234567) == 0.123456789012
        assert round_significant(float("inf")) is None
        assert round_significant(np.float64("nan")) is None
        assert round_significant({"a": [np.float64(1 / 3), True, 3]}) == {"a": [0.333333333333, True, 3]}
        assert round_significant(np.array([2 / 3])) == [0.666666666667]

    def test_every_output_needs_a_unit(self):
        with self.assertRaises(InvariantViolationError):
            build_record("capacity", {}, {"c_bar": 1.0}, {}, "0.3.0")
        with self.assertRaises(InvariantViolationError):
            build_record("capacity", {}, {"c_bar": 1.0}, {"c_bar": "furlongs"}, "0.3.0")
        with self.assertRaises(InvariantViolationError):
            build_record("typicality", {}, {}, {}, "0.3.0", table=[{"n": 1}], table_units={})

    def test_dump_is_sorted(self):
        record = build_record("capacity", {"spec": "x.json"}, {"c_bar": 1.0}, {"c_bar": "bits"}, "0.3.0")
        text = dump_record(record)
        assert json.loads(text) == record
        assert text.index('"command"') < text.index('"inputs"') < text.index('"outputs"')
        assert record["schema"] == "holevo.result/v1"
