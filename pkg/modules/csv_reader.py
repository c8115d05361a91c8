#!/usr/bin/env python3
"""
Text and CSV input for the ConPT percolation toolkit.

This module reads the two kinds of input documents the toolkit accepts:
- network edge-list documents (parsed by modules.network_io)
- curve CSV files in the format ``label,x,y`` where label is
  ``rules/lattice/size`` (for example ``conpt/square/4``)

Key Features:
- Encoding Detection: chardet (if available, >70% confidence), then BOM
  sniffing, then trial decoding, then UTF-8 fallback
- Caching: detected encodings are remembered per path
- Validation: files pass FileValidator before they are opened

Classes:
    EncodingDetector: multi-step encoding detection
    CurveCSVReader: reads curve CSV files into scaling.Curve objects
"""

import csv
import io
import logging
from collections import OrderedDict
from typing import Dict, List, Optional

import numpy as np

try:
    import chardet
    CHARDET_AVAILABLE = True
except ImportError:
    CHARDET_AVAILABLE = False
    chardet = None

from modules import config
from modules.exceptions import NetworkFormatError, ValidationError
from modules.performance import timed
from modules.scaling import Curve, CurveLabel
from modules.security import FileValidator


class EncodingDetector:
    """
    Detects the text encoding of an input file.

    Attributes:
        logger: Optional logger instance
        _encoding_cache: Detected encodings keyed by path

    Usage:
        >>> detector = EncodingDetector()
        >>> detector.detect_encoding('lattice.net')
        'utf-8'
    """

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger
        self._encoding_cache: Dict[str, str] = {}

    def detect_encoding(self, file_path: str) -> str:
        """
        Detect file encoding using chardet, BOM and trial decoding.

        Returns:
            Encoding name usable with open(); 'utf-8' when nothing matched
        """
        if file_path in self._encoding_cache:
            return self._encoding_cache[file_path]

        detection_methods = [
            ("BOM", self._detect_bom),
            ("chardet", self._detect_with_chardet),
            ("trial-and-error", self._detect_by_trial)
        ]
        for method_name, method in detection_methods:
            detected_encoding = method(file_path)
            if detected_encoding:
                self._encoding_cache[file_path] = detected_encoding
                if self.logger:
                    self.logger.debug(f"Detected encoding with {method_name}: {detected_encoding}")
                return detected_encoding

        if self.logger:
            self.logger.warning(config.ERROR_MESSAGES["invalid_encoding"])
        return 'utf-8'

    def _detect_with_chardet(self, file_path: str) -> Optional[str]:
        """chardet detection, accepted above 70% confidence."""
        if not CHARDET_AVAILABLE:
            return None
        try:
            with open(file_path, 'rb') as f:
                raw_data = f.read(8192)
        except OSError:
            return None
        if not raw_data:
            return 'utf-8'

        result = chardet.detect(raw_data)
        if result and result.get('encoding') and result['confidence'] > 0.7:
            encoding = result['encoding'].lower().replace('-', '')
            normalized = config.ENCODING_MAP.get(encoding, result['encoding'].lower())
            if normalized in config.SUPPORTED_ENCODINGS:
                return normalized
        return None

    def _detect_bom(self, file_path: str) -> Optional[str]:
        """Encoding from a byte order mark, if present."""
        try:
            with open(file_path, 'rb') as f:
                raw_data = f.read(4)
        except OSError:
            return None
        if raw_data.startswith(b'\xef\xbb\xbf'):
            return 'utf-8-sig'
        if raw_data.startswith(b'\xff\xfe') or raw_data.startswith(b'\xfe\xff'):
            return 'utf-16'
        return None

    def _detect_by_trial(self, file_path: str) -> Optional[str]:
        """First supported encoding that decodes the whole file."""
        for encoding in config.SUPPORTED_ENCODINGS:
            try:
                with open(file_path, 'r', encoding=encoding) as f:
                    f.read()
                return encoding
            except (UnicodeDecodeError, UnicodeError):
                continue
            except OSError:
                return None
        return None

    def read_text(self, file_path: str, encoding: str = config.DEFAULT_FILE_ENCODING) -> str:
        """
        Read a whole text file, detecting the encoding if asked to.

        Line endings are normalized to LF.
        """
        if encoding == "autodetect":
            encoding = self.detect_encoding(file_path)
        with open(file_path, 'r', encoding=encoding, newline=None) as f:
            return f.read()


# Accepted names for the x and y columns, in order of preference
X_COLUMNS = ('x', 'w', 'p', 'c')
Y_COLUMNS = ('y', 'mean', 'estimate', 'value')


class CurveCSVReader:
    """
    Reads curve CSV files (label, x, y) produced by sweeps.

    Lines starting with '#' are header comments and are skipped. Rows of one
    label form one curve; rows are sorted by x.

    Usage:
        >>> reader = CurveCSVReader(logger)
        >>> curves = reader.read_curves('square_conpt.csv')
        >>> [curve.label.size for curve in curves]
        [3, 4, 5]
    """

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger
        self.detector = EncodingDetector(logger)

    @timed("csv_reader.read_curves")
    def read_curves(self, file_path: str, encoding: str = config.DEFAULT_FILE_ENCODING) -> List[Curve]:
        """
        Parse a curve CSV file.

        Raises:
            FileSecurityError: If the file fails validation
            NetworkFormatError: If a row cannot be parsed
        """
        FileValidator.validate_csv_file(file_path)
        text = self.detector.read_text(file_path, encoding)
        curves = self.parse_curves(text, file_path)
        if self.logger:
            self.logger.info(f"Read {len(curves)} curves from {file_path}")
        return curves

    def parse_curves(self, text: str, source: str = "<text>") -> List[Curve]:
        """Parse curve CSV text into curves ordered by size."""
        lines = [line for line in text.splitlines() if not line.lstrip().startswith('#')]
        reader = csv.DictReader(io.StringIO("\n".join(lines)))
        fields = set(reader.fieldnames or ())
        x_column = next((name for name in X_COLUMNS if name in fields), None)
        y_column = next((name for name in Y_COLUMNS if name in fields), None)
        if 'label' not in fields or x_column is None or y_column is None:
            raise NetworkFormatError("Curve CSV needs columns label,x,y", line_number=1,
                                     column=1, file_path=source)

        points: "OrderedDict[str, List[tuple]]" = OrderedDict()
        for row_number, row in enumerate(reader, start=2):
            try:
                x, y = float(row[x_column]), float(row[y_column])
            except (TypeError, ValueError) as e:
                raise NetworkFormatError(f"Bad numeric value in row {row}", line_number=row_number,
                                         column=2, file_path=source) from e
            points.setdefault(row['label'], []).append((x, y))

        curves = []
        for label_text, pairs in points.items():
            pairs.sort()
            xs = np.array([pair[0] for pair in pairs])
            ys = np.array([pair[1] for pair in pairs])
            try:
                curves.append(Curve(xs, ys, CurveLabel.parse(label_text)))
            except ValidationError as e:
                raise NetworkFormatError(f"Invalid curve '{label_text}': {e.message}",
                                         file_path=source) from e
        return sorted(curves, key=lambda curve: curve.label.size)
