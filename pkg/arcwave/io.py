"""
Result files: JSON documents for solutions and certificates, CSV tables for anything meant for a
plot. JSON is written with sorted keys and a fixed float format, so reruns with the same inputs
give byte-identical files.

Tables produced while a worker pool is running go through a :class:`CSVWriter`, which consumes a
subscription and is the only thing touching its file::

    writer = CSVWriter("sweep.csv", ["node", "y", "re", "im"], row=lambda r: [r.index, ...], rows=33)
    writer.putSubscription(producer.subscribe(OrderedSubscription(33)))
    await writer
"""
import asyncio
import csv
import json
import logging
import math

import numpy as np

from .base import ConsumerClosed, ResultConsumer
from .errors import ConfigError

_log = logging.getLogger("arcwave.io")


def _plain(value):
    # numpy scalars and arrays to JSON-friendly python values; inf and NaN to None
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (np.complexfloating, complex)):
        return [_plain(value.real), _plain(value.imag)]
    return value


def dumps(obj):
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    with open(path, "w") as f:
        f.write(dumps(obj))
    _log.debug("Wrote %s", path)


def read_json(path):
    """
    Reads a JSON document, turning missing files and syntax errors into
    :class:`~arcwave.errors.ConfigError`.
    """
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise ConfigError("Cannot read %s: %s" % (path, e.strerror or e))
    except json.JSONDecodeError as e:
        raise ConfigError("Malformed JSON in %s: %s" % (path, e))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    _log.debug("Wrote %s", path)


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def solution_document(solution, config=None):
    """
    The solution JSON: densities, diagnostics and, if given, the configuration that produced it.
    """
    doc = solution.toDict()
    if config is not None:
        doc["config"] = config.toDict()
    return doc


def field_rows(X, Y, U):
    """
    Rows ``x, y, Re u, Im u`` (one pair per component) of a field grid. Points that were not
    evaluated come out as ``nan``.
    """
    U = np.asarray(U)
    comps = U.reshape((-1,) + X.shape)
    for idx in np.ndindex(X.shape):
        row = [X[idx], Y[idx]]
        for c in comps:
            row += [c[idx].real, c[idx].imag]
        yield row


def field_header(components):
    if components == 1:
        return ["x", "y", "re_u", "im_u"]
    header = ["x", "y"]
    for k in range(components):
        header += ["re_u%d" % k, "im_u%d" % k]
    return header


def coefficient_rows(sweeps):
    """
    Rows ``index, n, |c_n|`` of the sweeps' Chebyshev coefficients, for plotting decay lines.
    """
    for s in sweeps:
        for n, c in enumerate(s.coeffs):
            yield [s.index, n, abs(c)]


class CSVWriter(ResultConsumer):
    """
    Writes one CSV row per element it receives, in arrival order, until ``rows`` elements were
    written or it is closed. Awaiting the writer waits until the file is closed.

    Must be created inside a running event loop.

    Args:
        path: output file.
        header: column names.
        row (callable, optional): maps an element to the list of cells; elements are written as-is
            otherwise. Returning ``None`` skips the element.
        rows (int, optional): number of elements after which the writer closes itself.
    """

    def __init__(self, path, header, row=None, rows=None, logger=None):
        super().__init__(asyncio.Queue, logger=logger)
        self._path = path
        self._header = list(header)
        self._row = row
        self._rows = rows
        self._written = 0
        self._task = asyncio.ensure_future(self._writer())

    @property
    def written(self):
        return self._written

    async def _writer(self):
        try:
            with open(self._path, "w", newline="") as f:
                w = csv.writer(f, lineterminator="\n")
                w.writerow(self._header)
                self._setReady(True)
                received = 0
                while self._rows is None or received < self._rows:
                    try:
                        element = await self._get()
                    except ConsumerClosed:
                        break
                    received += 1
                    cells = element if self._row is None else self._row(element)
                    if cells is not None:
                        w.writerow([_cell(v) for v in cells])
                        self._written += 1
            _log.debug("Wrote %d rows to %s", self._written, self._path)
        except Exception as e:
            _log.error("Writing %s failed: %s", self._path, e)
            self._setError(e)
        self.close()
