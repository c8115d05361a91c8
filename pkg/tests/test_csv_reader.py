#!/usr/bin/env python3
"""
Test cases for curve CSV input and encoding detection.

Covers:
- label,x,y curves and alias column names
- Comment lines, row ordering and size ordering
- Malformed rows, missing columns and bad labels
- BOM detection and the encoding cache
"""

import os
import sys
import tempfile
import unittest
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.csv_reader import CurveCSVReader, EncodingDetector
from modules.exceptions import FileSecurityError, NetworkFormatError

CURVES = """# conpt 1.0.0 command=mc seed=1
label,x,y
conpt/square/8,0.5,0.6
conpt/square/4,0.6,0.7
conpt/square/4,0.4,0.3
conpt/square/8,0.4,0.2
"""


class TestParseCurves(unittest.TestCase):
    """Text to curves."""

    def setUp(self):
        self.reader = CurveCSVReader()

    def test_curves_grouped_and_sorted(self):
        curves = self.reader.parse_curves(CURVES)
        self.assertEqual([curve.label.size for curve in curves], [4, 8])
        self.assertEqual(curves[0].xs.tolist(), [0.4, 0.6])
        self.assertEqual(curves[0].ys.tolist(), [0.3, 0.7])
        self.assertEqual(curves[1].label.rules, "conpt")
        self.assertEqual(curves[1].label.lattice, "square")

    def test_alias_columns(self):
        text = "label,w,mean\nclassical/bethe/3,0.6,0.1\nclassical/bethe/3,0.7,0.4\n"
        curve, = self.reader.parse_curves(text)
        self.assertEqual(curve.xs.tolist(), [0.6, 0.7])
        self.assertEqual(curve.ys.tolist(), [0.1, 0.4])

        text = "label,p,estimate,stderr\nclassical/square/3,0.2,0.0,0.0\nclassical/square/3,0.8,1.0,0.0\n"
        curve, = self.reader.parse_curves(text)
        self.assertEqual(curve.ys.tolist(), [0.0, 1.0])

    def test_bad_numeric_value(self):
        text = "label,x,y\nconpt/square/4,0.4,oops\n"
        with self.assertRaises(NetworkFormatError) as ctx:
            self.reader.parse_curves(text, "curves.csv")
        self.assertEqual(ctx.exception.context["file_path"], "curves.csv")

    def test_missing_columns(self):
        for text in ("x,y\n0.1,0.2\n", "label,y\nconpt/square/4,0.2\n", ""):
            with self.assertRaises(NetworkFormatError):
                self.reader.parse_curves(text)

    def test_invalid_label(self):
        for label in ("square/4", "quantum/square/4", "conpt/square/four"):
            text = f"label,x,y\n{label},0.1,0.2\n{label},0.2,0.3\n"
            with self.assertRaises(NetworkFormatError):
                self.reader.parse_curves(text)

    def test_single_point_curve_rejected(self):
        with self.assertRaises(NetworkFormatError):
            self.reader.parse_curves("label,x,y\nconpt/square/4,0.1,0.2\n")


class TestReadCurves(unittest.TestCase):
    """Reading curve files from disk."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        for name in os.listdir(self.temp_dir):
            os.remove(os.path.join(self.temp_dir, name))
        os.rmdir(self.temp_dir)

    def write(self, name, data):
        path = os.path.join(self.temp_dir, name)
        Path(path).write_bytes(data)
        return path

    def test_read_csv_file(self):
        path = self.write("curves.csv", CURVES.encode("utf-8"))
        curves = CurveCSVReader().read_curves(path)
        self.assertEqual(len(curves), 2)

    def test_crlf_and_bom(self):
        data = b"\xef\xbb\xbf" + CURVES.replace("\n", "\r\n").encode("utf-8")
        path = self.write("curves.csv", data)
        curves = CurveCSVReader().read_curves(path)
        self.assertEqual([curve.label.size for curve in curves], [4, 8])

    def test_wrong_extension(self):
        path = self.write("curves.dat", CURVES.encode("utf-8"))
        with self.assertRaises(FileSecurityError):
            CurveCSVReader().read_curves(path)

    def test_missing_file(self):
        with self.assertRaises(FileSecurityError):
            CurveCSVReader().read_curves(os.path.join(self.temp_dir, "none.csv"))


class TestEncodingDetector(unittest.TestCase):
    """Encoding detection."""

    def test_bom_detection_and_cache(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = os.path.join(temp_dir, "grid.net")
            Path(path).write_bytes(b"\xef\xbb\xbfnodes 0 1\n")
            detector = EncodingDetector()
            self.assertEqual(detector.detect_encoding(path), "utf-8-sig")
            Path(path).write_bytes(b"nodes 0 1\n")
            self.assertEqual(detector.detect_encoding(path), "utf-8-sig")
            self.assertEqual(detector.read_text(path, "utf-8"), "nodes 0 1\n")

    def test_plain_ascii_reads(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = os.path.join(temp_dir, "grid.net")
            Path(path).write_bytes(b"nodes 0 1\r\nlink 0 1 0.5\r\n")
            text = EncodingDetector().read_text(path)
            self.assertEqual(text, "nodes 0 1\nlink 0 1 0.5\n")


if __name__ == '__main__':
    unittest.main()
