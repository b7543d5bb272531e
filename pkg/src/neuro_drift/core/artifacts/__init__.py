"""On-disk artifact formats."""

from .event_log import EVENT_COLUMNS, events_to_frame, read_event_log, write_event_log
from .gene_map import read_gene_map, write_gene_map
from .headers import (
    check_format_version,
    file_sha256,
    format_comment_header,
    format_json_header,
    parse_comment_header,
    parse_json_header,
)
from .population import POPULATION_COLUMNS, read_population, write_population
from .run_dir import COMPLETE_MARKER, INCOMPLETE_MARKER, RunDirectory
from .snapshots import SnapshotWriter, read_snapshots
from .traces import iter_traces, read_trace, trace_filename, trace_header_for, write_trace

__all__ = [
    "COMPLETE_MARKER",
    "EVENT_COLUMNS",
    "INCOMPLETE_MARKER",
    "POPULATION_COLUMNS",
    "RunDirectory",
    "SnapshotWriter",
    "check_format_version",
    "events_to_frame",
    "file_sha256",
    "format_comment_header",
    "format_json_header",
    "iter_traces",
    "parse_comment_header",
    "parse_json_header",
    "read_event_log",
    "read_gene_map",
    "read_population",
    "read_snapshots",
    "read_trace",
    "trace_filename",
    "trace_header_for",
    "write_event_log",
    "write_gene_map",
    "write_population",
    "write_trace",
]
