#!/usr/bin/env python3
"""
File validation utilities for the ConPT percolation toolkit.
"""

import os
import logging
from pathlib import Path
from typing import Optional, Set

from modules import config
from modules.exceptions import FileSecurityError

logger = logging.getLogger(__name__)


class FileValidator:
    """Validates input and output paths before any file is touched."""

    @classmethod
    def validate_file_path(cls, file_path: str, allowed_extensions: Optional[Set[str]] = None) -> bool:
        """
        Validate a path string and its extension.

        Args:
            file_path: Path to validate
            allowed_extensions: Set of allowed file extensions

        Returns:
            True if path is acceptable

        Raises:
            FileSecurityError: If path is empty, malformed or has a disallowed extension
        """
        logger.debug(f"Validating file path: {file_path}")
        if not file_path:
            raise FileSecurityError("Empty file path", reason="empty_path")

        try:
            os.path.normpath(os.path.abspath(file_path))
        except (ValueError, OSError) as e:
            raise FileSecurityError(f"Invalid file path: {file_path}", file_path=file_path,
                                    reason="invalid_path") from e

        if allowed_extensions:
            file_ext = Path(file_path).suffix.lower()
            if file_ext not in allowed_extensions:
                raise FileSecurityError(
                    config.ERROR_MESSAGES["invalid_extension"].format(ext=file_ext or "<none>"),
                    file_path=file_path,
                    reason="disallowed_extension"
                )
        return True

    @classmethod
    def validate_file_size(cls, file_path: str) -> bool:
        """
        Validate that an existing file is below config.MAX_FILE_SIZE.

        Raises:
            FileSecurityError: If file is too large or cannot be accessed
        """
        try:
            size = os.path.getsize(file_path)
        except OSError as e:
            raise FileSecurityError(f"Cannot access file: {file_path}", file_path=file_path,
                                    reason="access_error") from e
        if size > config.MAX_FILE_SIZE:
            raise FileSecurityError(
                config.ERROR_MESSAGES["file_too_large"].format(size=size, max_size=config.MAX_FILE_SIZE),
                file_path=file_path,
                reason="file_too_large"
            )
        return True

    @classmethod
    def validate_input_file(cls, file_path: str, allowed_extensions: Optional[Set[str]] = None) -> bool:
        """
        Full check for a file that is about to be read.

        Raises:
            FileSecurityError: If the file is missing, not a regular file,
                               has the wrong extension or is too large
        """
        cls.validate_file_path(file_path, allowed_extensions)
        if not os.path.isfile(file_path):
            raise FileSecurityError(config.ERROR_MESSAGES["file_not_found"].format(path=file_path),
                                    file_path=file_path, reason="not_found")
        cls.validate_file_size(file_path)
        logger.debug(f"Input file accepted: {file_path}")
        return True

    @classmethod
    def validate_network_file(cls, path: str) -> bool:
        """Validate a network edge-list document."""
        return cls.validate_input_file(path, config.ALLOWED_NETWORK_EXTENSIONS)

    @classmethod
    def validate_csv_file(cls, csv_path: str) -> bool:
        """Validate a curve CSV file."""
        return cls.validate_input_file(csv_path, config.ALLOWED_CSV_EXTENSIONS)

    @classmethod
    def validate_output_path(cls, file_path: str) -> bool:
        """
        Check that the output directory exists and is writable.

        Raises:
            FileSecurityError: If the parent directory is missing or read-only
        """
        cls.validate_file_path(file_path)
        parent = os.path.dirname(os.path.abspath(file_path))
        if not os.path.isdir(parent):
            raise FileSecurityError(f"Output directory does not exist: {parent}",
                                    file_path=file_path, reason="missing_directory")
        if not os.access(parent, os.W_OK):
            raise FileSecurityError(f"Output directory is not writable: {parent}",
                                    file_path=file_path, reason="read_only")
        return True
