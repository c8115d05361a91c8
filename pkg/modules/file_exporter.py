#!/usr/bin/env python3
"""
File Export Utilities Module for the ConPT percolation toolkit

Writes every artifact the toolkit produces: sweep CSVs, fit reports, trace
records and canonical network documents.

Architecture:
    1. TempFileManager
       Creates temporary files next to their final destination and removes
       whatever is left over when the context exits.

    2. CSVExporter
       Validates rows (finite numbers only), sorts them by key columns,
       writes a header comment line plus a column header and renames the
       temporary file onto the target only on success.

    3. TraceWriter
       Collects per-run reduction trace records and writes them through a
       CSVExporter.

Output Format:
    UTF-8, comma separated, '.' decimal point, LF line endings. Floats are
    written with repr() so values read back bit-identically.

Usage Examples:
    >>> exporter = CSVExporter(logger)
    >>> exporter.write_rows('bethe.csv', '# conpt 1.0.0 command=bethe seed=1',
    ...                     ['rules', 'k', 'w', 'value'], rows, sort_keys=['k', 'w'])

Error Handling:
    All failures raise ExportError with the output path in the context.
"""

import os
import tempfile
from typing import Any, Dict, Iterable, List, Optional, Sequence

from modules import config
from modules.exceptions import ExportError, FileSecurityError
from modules.performance import timed
from modules.security import FileValidator
from modules.utilities import format_number, is_finite_number


class TempFileManager:
    """
    Manages temporary files created next to their destination.

    Files that were not handed over with commit() are deleted on exit.

    Examples:
        >>> with TempFileManager(logger) as temp_mgr:
        ...     temp_path = temp_mgr.create_temp_file('/out/result.csv')
        ...     ...  # write temp_path
        ...     temp_mgr.commit(temp_path, '/out/result.csv')
    """

    def __init__(self, logger: Optional[Any] = None):
        self.logger = logger
        self.temp_files: List[str] = []

    def create_temp_file(self, target_path: str, prefix: str = ".conpt_") -> str:
        """
        Create an empty temporary file in the target's directory.

        Keeping the temporary file on the same filesystem makes the final
        rename atomic.
        """
        directory = os.path.dirname(os.path.abspath(target_path))
        fd, temp_path = tempfile.mkstemp(prefix=prefix, suffix=".tmp", dir=directory)
        os.close(fd)
        self.temp_files.append(temp_path)
        if self.logger:
            self.logger.debug(f"Created temporary file: {temp_path}")
        return temp_path

    def commit(self, temp_path: str, target_path: str) -> None:
        """Atomically move a finished temporary file onto its target."""
        os.replace(temp_path, target_path)
        self.temp_files.remove(temp_path)
        if self.logger:
            self.logger.debug(f"Renamed {temp_path} -> {target_path}")

    def cleanup(self) -> None:
        """Remove all temporary files that were not committed."""
        for temp_file in self.temp_files[:]:
            try:
                if os.path.exists(temp_file):
                    os.remove(temp_file)
            except OSError as e:
                if self.logger:
                    self.logger.warning(f"Failed to remove temporary file {temp_file}: {e}")
            self.temp_files.remove(temp_file)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.cleanup()
        return False


class CSVExporter:
    """
    Writes result tables atomically.

    Attributes:
        logger: Optional logging instance for debug output
    """

    def __init__(self, logger: Optional[Any] = None):
        self.logger = logger

    @staticmethod
    def render(header_comment: Optional[str], columns: Sequence[str],
               rows: Iterable[Dict[str, Any]], sort_keys: Optional[Sequence[str]] = None) -> str:
        """
        Render rows to CSV text, sorted by sort_keys.

        Raises:
            ExportError: If a value is NaN or infinite, or a column is missing
        """
        rows = list(rows)
        for row in rows:
            for column in columns:
                if column not in row:
                    raise ExportError(f"Row is missing column '{column}'")
                if not is_finite_number(row[column]):
                    raise ExportError(config.ERROR_MESSAGES["non_finite"].format(column=column))
        if sort_keys:
            rows.sort(key=lambda row: tuple(row[key] for key in sort_keys))

        lines = []
        if header_comment:
            lines.append(header_comment if header_comment.startswith('#') else f"# {header_comment}")
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(format_number(row[column]) for column in columns))
        return "\n".join(lines) + "\n"

    @timed("file_exporter.write_rows")
    def write_rows(self, output_path: str, header_comment: Optional[str], columns: Sequence[str],
                   rows: Iterable[Dict[str, Any]], sort_keys: Optional[Sequence[str]] = None) -> str:
        """
        Write rows to output_path through a temporary file.

        Returns:
            The output path

        Raises:
            ExportError: If validation or writing fails; the target is untouched
        """
        text = self.render(header_comment, columns, rows, sort_keys)
        self.write_text(output_path, text)
        if self.logger:
            self.logger.info(f"Wrote {text.count(chr(10)) - 1} lines to {output_path}")
        return output_path

    def write_text(self, output_path: str, text: str) -> str:
        """Atomically write a UTF-8 text document with LF line endings."""
        try:
            FileValidator.validate_output_path(output_path)
        except FileSecurityError as e:
            raise ExportError(config.ERROR_MESSAGES["export_failed"].format(error=e.message),
                              output_path=output_path) from e

        with TempFileManager(self.logger) as temp_mgr:
            try:
                temp_path = temp_mgr.create_temp_file(output_path)
                with open(temp_path, 'w', encoding='utf-8', newline='\n') as f:
                    f.write(text)
                temp_mgr.commit(temp_path, output_path)
            except OSError as e:
                raise ExportError(config.ERROR_MESSAGES["export_failed"].format(error=e),
                                  output_path=output_path) from e
        return output_path


class TraceWriter:
    """
    Collects per-run reduction trace records.

    Columns: run, order_hash, final_theta, wall_time. Wall time is the only
    column that differs between identical runs.
    """

    COLUMNS = ("run", "order_hash", "final_theta", "wall_time")

    def __init__(self, logger: Optional[Any] = None):
        self.logger = logger
        self.records: List[Dict[str, Any]] = []

    def add(self, run: int, order_hash: str, final_theta: float, wall_time: float) -> None:
        """Append one trace record."""
        self.records.append({
            "run": run,
            "order_hash": order_hash,
            "final_theta": final_theta,
            "wall_time": wall_time,
        })

    def extend(self, records: Iterable[Dict[str, Any]]) -> None:
        """Append several trace records."""
        for record in records:
            self.add(record["run"], record["order_hash"], record["final_theta"], record["wall_time"])

    def write(self, output_path: str, header_comment: Optional[str] = None) -> str:
        """Write all records sorted by run."""
        return CSVExporter(self.logger).write_rows(output_path, header_comment, self.COLUMNS,
                                                   self.records, sort_keys=["run"])
