# Copyright (c) 2026, itsdave GmbH and Contributors
# See license.txt

import json
import math
import os
import tempfile
import unittest
from dataclasses import replace

import numpy as np

from nonreciprocal_entanglement.exceptions import ConfigError, OutputError
from nonreciprocal_entanglement.model.entanglement.entanglement import ModePair
from nonreciprocal_entanglement.model.params.params import reference_params
from nonreciprocal_entanglement.model.sweep.sweep import Axis, SweepSpec, emit, presets, read_csv, run_sweep

# pairs without a1, whose blocks stay physical at the reference point
PHYSICAL_PAIRS = tuple(ModePair.parse(label) for label in ("a2B1", "a2B2", "B1B2"))


class TestSweep(unittest.TestCase):
	def setUp(self):
		self.base = reference_params()
		self.tmp = tempfile.TemporaryDirectory()

	def tearDown(self):
		self.tmp.cleanup()

	def path(self, name):
		return os.path.join(self.tmp.name, name)

	def test_undriven_grid(self):
		spec = SweepSpec(
			base=self.base,
			overrides={"E": 0.0},
			axes=(Axis("normalized.Delta_c1", 0.5, 1.5, 2), Axis("physical.T", 100.0, 300.0, 2)),
		)
		frame = run_sweep(spec).to_frame()
		self.assertEqual(len(frame), 4)
		self.assertTrue(frame["stable"].all())
		self.assertEqual(set(frame["status"]), {"ok"})
		for pair in ("a2B1", "a2B2", "B1B2"):
			self.assertLessEqual(frame[f"E_{pair}"].max(), 1e-12)
		# nonreciprocal coupling pushes a1 below the vacuum variance
		self.assertFalse(frame["bona_fide"].any())
		self.assertEqual(list(frame["normalized.Delta_c1"]), [0.5, 0.5, 1.5, 1.5])
		self.assertEqual(list(frame["physical.T"]), [100.0, 300.0, 100.0, 300.0])

	def test_empty_axes_give_header_only(self):
		spec = SweepSpec(base=self.base)
		table = run_sweep(spec)
		self.assertEqual(table.rows, [])
		emit(table, self.path("empty.csv"))
		with open(self.path("empty.csv"), encoding="utf-8") as f:
			body = [line for line in f if not line.startswith("#")]
		self.assertEqual(body, [",".join(spec.header()) + "\n"])

	def test_paired_rows_and_columns(self):
		spec = SweepSpec(
			base=self.base,
			axes=(Axis("normalized.E", 8.0, 16.0, 2),),
			paired_spin=True,
			include_reference=True,
		)
		table = run_sweep(spec)
		frame = table.to_frame()
		self.assertEqual(len(frame), 6)
		self.assertEqual(list(frame["spin"]), ["none", "CW", "CCW"] * 2)
		self.assertIn("C_a2B1", table.header)
		self.assertIn("C_a2B1_undefined", table.header)
		reference = frame[frame["spin"] == "none"]
		self.assertTrue(reference["C_a2B1"].isna().all())
		self.assertTrue(reference["C_a2B1_undefined"].all())
		self.assertEqual(list(frame["Delta_F"][:3]), [0.0, 0.1, -0.1])

	def test_zero_shift_pairing_has_no_contrast(self):
		spec = SweepSpec(
			base=self.base,
			overrides={"Delta_F": 0.0},
			axes=(Axis("normalized.Delta_c2", 0.5, 1.5, 3),),
			paired_spin=True,
			pairs=PHYSICAL_PAIRS,
		)
		frame = run_sweep(spec).to_frame()
		ok = frame[frame["status"] == "ok"]
		self.assertGreater(len(ok), 0)
		for pair in ("a2B1", "a2B2", "B1B2"):
			self.assertLessEqual(ok[f"C_{pair}"].abs().max(), 1e-12)

	def test_molecule_split_symmetry(self):
		spec = SweepSpec(base=self.base, axes=(Axis("physical.M", 30.0, 70.0, 2),), pairs=PHYSICAL_PAIRS)
		frame = run_sweep(spec).to_frame()
		self.assertEqual(list(frame["status"]), ["ok", "ok"])
		self.assertAlmostEqual(frame["E_B1B2"][0], frame["E_B1B2"][1], places=9)

	def test_deterministic_across_job_counts(self):
		spec = SweepSpec(
			base=self.base,
			axes=(Axis("normalized.E", 4.0, 16.0, 3), Axis("physical.N", 80.0, 120.0, 2, couple_m=True)),
			paired_spin=True,
		)
		emit(run_sweep(spec, jobs=1), self.path("serial.csv"))
		emit(run_sweep(spec, jobs=2), self.path("parallel.csv"))
		with open(self.path("serial.csv"), "rb") as a, open(self.path("parallel.csv"), "rb") as b:
			self.assertEqual(a.read(), b.read())

	def test_csv_round_trip(self):
		spec = SweepSpec(base=self.base, axes=(Axis("normalized.E", 4.0, 16.0, 3),))
		table = run_sweep(spec)
		emit(table, self.path("out.csv"))
		frame = read_csv(self.path("out.csv"))
		self.assertEqual(tuple(frame.columns), table.header)
		expected = table.to_frame()
		for column in ("margin", "selected_u", "E_a2B1", "zeta_B1B2"):
			np.testing.assert_allclose(frame[column], expected[column], rtol=1e-11)
		with open(self.path("out.csv"), encoding="utf-8") as f:
			self.assertTrue(f.readline().startswith("# app: nonreciprocal_entanglement"))

	def test_json_marks_missing_values_as_null(self):
		spec = SweepSpec(base=self.base, axes=(Axis("physical.M", 50.0, 150.0, 2),), pairs=PHYSICAL_PAIRS)
		table = run_sweep(spec)
		self.assertEqual(table.statuses()[1], "invalid-parameter")
		self.assertEqual(table.failed(), 1)
		emit(table, self.path("out.json"), "json")
		with open(self.path("out.json"), encoding="utf-8") as f:
			records = json.load(f)
		self.assertEqual(len(records), 2)
		self.assertIsNone(records[1]["E_a2B1"])
		self.assertFalse(records[1]["stable"])
		value = records[0]["E_B1B2"]
		self.assertEqual(value, float("%.11e" % value))
		self.assertFalse(math.isnan(records[0]["margin"]))

	def test_emit_reports_path_on_io_failure(self):
		table = run_sweep(SweepSpec(base=self.base))
		missing = self.path(os.path.join("no", "such", "dir", "out.csv"))
		with self.assertRaises(OutputError) as ctx:
			emit(table, missing)
		self.assertIn(missing, str(ctx.exception))

	def test_spec_validation(self):
		with self.assertRaises(ConfigError):
			Axis("physical.omega", 0.0, 1.0, 3)
		with self.assertRaises(ConfigError):
			Axis("normalized.E", 0.0, 1.0, 1)
		with self.assertRaises(ConfigError):
			Axis("physical.T", 0.0, 1.0, 3, scale="log")
		with self.assertRaises(ConfigError):
			Axis("physical.T", 1.0, 2.0, 3, couple_m=True)
		with self.assertRaises(ConfigError):
			SweepSpec(base=self.base, outputs=("contrast",))
		with self.assertRaises(ConfigError):
			SweepSpec(base=self.base, outputs=("noise",))
		np.testing.assert_allclose(Axis("sagnac.Omega", 1.0, 100.0, 3, scale="log").values, [1.0, 10.0, 100.0])

	def test_presets(self):
		all_presets = presets()
		self.assertEqual(set(all_presets), {
			"fig2-stability", "fig3-detuning", "fig4-distribution",
			"fig5-contours", "fig6-contrast", "fig6-threshold",
		})
		self.assertEqual([s.name for s in all_presets["fig3-detuning"]],
			["fig3-detuning/delta_c1", "fig3-detuning/delta_c2"])
		threshold = all_presets["fig6-threshold"][0]
		self.assertEqual(threshold.base.T, 200.0)
		self.assertEqual(threshold.base.sagnac.direction, "none")
		self.assertTrue(all_presets["fig6-contrast"][0].paired_spin)
		m_axis = all_presets["fig4-distribution"][0].axes[0]
		self.assertEqual((m_axis.start, m_axis.stop), (1.0, 99.0))
		for part in all_presets["fig2-stability"]:
			drive, molecules = part.axes
			self.assertEqual((drive.path, drive.start, drive.stop, drive.count), ("normalized.E", 0.1, 20.0, 200))
			self.assertEqual((molecules.path, molecules.start, molecules.stop, molecules.count), ("physical.N", 1.0, 200.0, 200))
			self.assertTrue(molecules.couple_m)
		for parts in all_presets.values():
			for spec in parts:
				for axis in spec.axes:
					if axis.name == "N":
						self.assertTrue(axis.couple_m)


A2B1 = ModePair.parse("a2B1")


def by_spin(frame, spin):
	return frame[frame["spin"] == spin].reset_index(drop=True)


class TestSweepFigures(unittest.TestCase):
	def test_detuning_peak_for_counter_clockwise_spin(self):
		spec = replace(presets()["fig3-detuning"][0], pairs=(A2B1,))
		frame = run_sweep(spec).to_frame()
		ccw, cw, none = by_spin(frame, "CCW"), by_spin(frame, "CW"), by_spin(frame, "none")
		peak = ccw["E_a2B1"].idxmax()
		self.assertLessEqual(abs(ccw["normalized.Delta_c1"][peak] - 1.5), 0.15 + 1e-9)
		self.assertGreater(ccw["E_a2B1"][peak], none["E_a2B1"][peak])
		self.assertGreater(none["E_a2B1"][peak], cw["E_a2B1"][peak])
		self.assertGreater(ccw["C_a2B1"][peak], 0)
		self.assertFalse(ccw["C_a2B1_undefined"][peak])

	def test_molecule_split_shapes_the_negativities(self):
		spec = replace(presets()["fig4-distribution"][0], pairs=(A2B1, ModePair.parse("B1B2")))
		frame = by_spin(run_sweep(spec).to_frame(), "none")
		self.assertEqual(len(frame), 99)
		self.assertEqual(set(frame["status"]), {"ok"})
		self.assertGreaterEqual(np.diff(frame["E_a2B1"]).min(), -1e-10)
		lowest = frame["physical.M"][frame["E_B1B2"].idxmin()]
		self.assertLessEqual(abs(lowest - 50.0), 2.0)

	def test_contrast_null_and_saturation(self):
		spec = replace(presets()["fig6-contrast"][0], pairs=(A2B1,))
		frame = run_sweep(spec).to_frame()
		cw, ccw = by_spin(frame, "CW"), by_spin(frame, "CCW")
		x = cw["normalized.Delta_c2"].to_numpy()
		gap = (cw["E_a2B1"] - ccw["E_a2B1"]).to_numpy()
		crossings = [
			(x[i], x[i + 1]) for i in range(len(x) - 1)
			if gap[i] * gap[i + 1] < 0
		]
		# measured null sits between 0.60 and 0.65
		self.assertTrue(any(lo >= 0.58 - 1e-9 and hi <= 0.68 + 1e-9 for lo, hi in crossings), msg=crossings)
		bands = ((x > 0) & (x < 0.5)) | ((x >= 1.5) & (x <= 2.5 + 1e-9))
		self.assertGreaterEqual(cw["C_a2B1"][bands].max(), 0.9)

	def test_threshold_scan_is_entangled_from_few_molecules(self):
		threshold = presets()["fig6-threshold"][0]
		self.assertEqual(threshold.base.T, 200.0)
		spec = replace(threshold, axes=(Axis("physical.N", 10.0, 40.0, 2, couple_m=True),), pairs=PHYSICAL_PAIRS)
		frame = run_sweep(spec).to_frame()
		self.assertEqual(list(frame["status"]), ["ok", "ok"])
		# no threshold near N = 50: ten molecules already entangle both pairs
		self.assertGreater(frame["E_a2B1"][0], 0.1)
		self.assertGreater(frame["E_B1B2"][0], 0.1)

	def test_entanglement_depends_on_n_times_e_squared(self):
		threshold = presets()["fig6-threshold"][0]
		few = replace(threshold, overrides={"E": 32.0}, pairs=PHYSICAL_PAIRS,
			axes=(Axis("physical.N", 10.0, 11.0, 2, couple_m=True),))
		more = replace(threshold, overrides={"E": 16.0}, pairs=PHYSICAL_PAIRS,
			axes=(Axis("physical.N", 40.0, 41.0, 2, couple_m=True),))
		a, b = run_sweep(few).to_frame(), run_sweep(more).to_frame()
		for pair in ("a2B1", "a2B2", "B1B2"):
			self.assertAlmostEqual(a[f"E_{pair}"][0], b[f"E_{pair}"][0], places=8)
		self.assertAlmostEqual(a["margin"][0], b["margin"][0], places=12)
