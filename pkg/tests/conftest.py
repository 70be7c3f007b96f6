import numpy as np
import pytest

from stcsta.core import (
    CorrelationRow,
    CorrelationTable,
    Feature,
    ReadingMatrix,
    StreamId,
)

# Worked ten-sensor example: per-sensor best match and correlation degree,
# with the known-good order and reduction allocation.
TEN_SENSOR_MATCHES = [8, 1, 7, 3, 9, 1, 10, 7, 7, 7]
TEN_SENSOR_DEGREES = [0.78, 0.69, 0.54, 0.92, 0.85, 0.72, 0.79, 0.83, 0.89, 0.90]
TEN_SENSOR_ORDER = [8, 3, 9, 10, 1, 7]
TEN_SENSOR_REDUCTIONS = [17.0, 83.0, 54.0, 46.0, 11.0, 83.0, 10.0, 83.0, 89.0, 90.0]


def ten_sensor_streams():
    return [StreamId(i, Feature.AMBIENT_TEMP) for i in range(1, 11)]


@pytest.fixture
def ten_sensor_table():
    streams = ten_sensor_streams()
    rows = tuple(
        CorrelationRow(
            streams[i], streams[TEN_SENSOR_MATCHES[i] - 1], TEN_SENSOR_DEGREES[i]
        )
        for i in range(10)
    )
    return CorrelationTable(rows)


def make_matrix(values, feature=Feature.AMBIENT_TEMP, step=1.0):
    values = np.asarray(values, dtype=float)
    streams = [StreamId(i, feature) for i in range(values.shape[0])]
    timestamps = np.arange(values.shape[1], dtype=float) * step
    return ReadingMatrix(streams, values, timestamps)


def random_correlation_table(rng, n):
    """A consistent random table: symmetric rho matrix, true argmax matches."""
    rho = rng.uniform(-1.0, 1.0, size=(n, n))
    rho = (rho + rho.T) / 2
    np.fill_diagonal(rho, -np.inf)
    streams = [StreamId(i, Feature.AMBIENT_TEMP) for i in range(n)]
    rows = []
    for i in range(n):
        j = int(np.argmax(rho[i]))
        rows.append(CorrelationRow(streams[i], streams[j], float(rho[i, j])))
    return CorrelationTable(tuple(rows))
