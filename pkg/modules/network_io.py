#!/usr/bin/env python3
"""
Edge-list documents for networks.

Format (UTF-8 text, one record per line):

    # comment
    node <id>
    link <idA> <idB> <theta-in-radians>
    boundary A <id> ...
    boundary B <id> ...

Blank lines and lines starting with '#' are ignored. Links may name nodes
declared later in the document; every reference is checked once the whole
document has been read, and errors point at the offending token.

The canonical document written by save_network() lists nodes ascending,
links by (min id, max id, theta) with theta written via repr(), then the
boundary records. Loading a canonical document and saving it again gives
the same text.
"""

import logging
from typing import Dict, List, Optional, Tuple

from modules import config
from modules.csv_reader import EncodingDetector
from modules.exceptions import NetworkFormatError, ValidationError
from modules.file_exporter import CSVExporter
from modules.network import Network
from modules.performance import timed
from modules.security import FileValidator
from modules.utilities import format_number
from modules.weights import LinkWeight


def _columns(line: str) -> List[Tuple[str, int]]:
    """Split a line into (token, 1-based column) pairs."""
    tokens = []
    position = 0
    for token in line.split():
        position = line.index(token, position)
        tokens.append((token, position + 1))
        position += len(token)
    return tokens


class NetworkReader:
    """
    Parses edge-list documents into Network objects.

    Usage:
        >>> reader = NetworkReader(logger)
        >>> net = reader.read('lattice.net')
    """

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger
        self.detector = EncodingDetector(logger)

    @timed("network_io.read")
    def read(self, file_path: str, encoding: str = config.DEFAULT_FILE_ENCODING) -> Network:
        """
        Read and parse a network file.

        Raises:
            FileSecurityError: If the file fails validation
            NetworkFormatError: If the document is malformed
        """
        FileValidator.validate_network_file(file_path)
        text = self.detector.read_text(file_path, encoding)
        net = self.parse(text, file_path)
        if self.logger:
            self.logger.info(f"Loaded network from {file_path}: {len(net.nodes)} nodes, {net.link_count} links")
        return net

    def parse(self, text: str, source: str = "<text>") -> Network:
        """Parse document text."""
        nodes: Dict[int, Tuple[int, int]] = {}
        links = []
        references: List[Tuple[int, str, int, int]] = []
        boundaries: Dict[str, List[int]] = {"A": [], "B": []}
        boundary_seen: Dict[int, Tuple[int, int]] = {}

        for line_number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith('#'):
                continue
            tokens = _columns(line)
            record, record_column = tokens[0]

            if record == "node":
                self._expect_count(tokens, 2, line_number, source)
                node = self._parse_int(tokens[1], line_number, source)
                if node in nodes:
                    raise NetworkFormatError(config.ERROR_MESSAGES["duplicate_node"].format(node=node),
                                             line_number=line_number, column=tokens[1][1], file_path=source)
                nodes[node] = (line_number, tokens[1][1])

            elif record == "link":
                self._expect_count(tokens, 4, line_number, source)
                a = self._parse_int(tokens[1], line_number, source)
                b = self._parse_int(tokens[2], line_number, source)
                theta = self._parse_theta(tokens[3], line_number, source)
                references.append((a, "link", line_number, tokens[1][1]))
                references.append((b, "link", line_number, tokens[2][1]))
                links.append((a, b, theta))

            elif record == "boundary":
                if len(tokens) < 3 or tokens[1][0] not in boundaries:
                    raise NetworkFormatError("Boundary record must be 'boundary A|B <id> ...'",
                                             line_number=line_number, column=record_column, file_path=source)
                side = tokens[1][0]
                for token in tokens[2:]:
                    node = self._parse_int(token, line_number, source)
                    if node in boundary_seen:
                        raise NetworkFormatError(
                            config.ERROR_MESSAGES["duplicate_boundary"].format(node=node),
                            line_number=line_number, column=token[1], file_path=source)
                    boundary_seen[node] = (line_number, token[1])
                    references.append((node, f"boundary {side}", line_number, token[1]))
                    boundaries[side].append(node)

            else:
                raise NetworkFormatError(config.ERROR_MESSAGES["bad_record"].format(record=record),
                                         line_number=line_number, column=record_column, file_path=source)

        for node, record, line_number, column in references:
            if node not in nodes:
                raise NetworkFormatError(config.ERROR_MESSAGES["unknown_node"].format(node=node, record=record),
                                         line_number=line_number, column=column, file_path=source)

        return Network.create(nodes.keys(), links, boundaries["A"], boundaries["B"])

    @staticmethod
    def _expect_count(tokens, count: int, line_number: int, source: str) -> None:
        if len(tokens) != count:
            raise NetworkFormatError(f"Record '{tokens[0][0]}' takes {count - 1} fields, got {len(tokens) - 1}",
                                     line_number=line_number, column=tokens[0][1], file_path=source)

    @staticmethod
    def _parse_int(token: Tuple[str, int], line_number: int, source: str) -> int:
        text, column = token
        try:
            return int(text)
        except ValueError as e:
            raise NetworkFormatError(config.ERROR_MESSAGES["bad_number"].format(token=text, kind="node id"),
                                     line_number=line_number, column=column, file_path=source) from e

    @staticmethod
    def _parse_theta(token: Tuple[str, int], line_number: int, source: str) -> LinkWeight:
        text, column = token
        try:
            return LinkWeight(float(text))
        except ValueError as e:
            raise NetworkFormatError(config.ERROR_MESSAGES["bad_number"].format(token=text, kind="angle"),
                                     line_number=line_number, column=column, file_path=source) from e
        except ValidationError as e:
            raise NetworkFormatError(e.message, line_number=line_number, column=column,
                                     file_path=source) from e


def load_network(text: str) -> Network:
    """
    Parse an edge-list document.

    Examples:
        >>> net = load_network("node 0\\nnode 1\\nlink 0 1 0.7853981633974483")
        >>> net.links[0].theta == math.pi / 4
        True
    """
    return NetworkReader().parse(text)


def save_network(net: Network) -> str:
    """Canonical edge-list document for a network."""
    lines = [f"node {node}" for node in sorted(net.nodes)]
    lines += [f"link {link.a} {link.b} {format_number(link.weight.theta)}" for link in net.links]
    if net.boundary_a:
        lines.append("boundary A " + " ".join(str(node) for node in sorted(net.boundary_a)))
    if net.boundary_b:
        lines.append("boundary B " + " ".join(str(node) for node in sorted(net.boundary_b)))
    return "\n".join(lines) + "\n"


def read_network_file(file_path: str, logger: Optional[logging.Logger] = None) -> Network:
    """Read a network file with encoding detection."""
    return NetworkReader(logger).read(file_path)


def write_network_file(file_path: str, net: Network, logger: Optional[logging.Logger] = None) -> str:
    """Atomically write the canonical document of net."""
    return CSVExporter(logger).write_text(file_path, save_network(net))
