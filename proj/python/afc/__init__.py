"""Python access to the cylinder wake control core."""

from ._core import (
    BrokerClient,
    BrokerError,
    BrokerServer,
    ConfigError,
    FormatError,
    NumericalError,
    Policy,
    Simulation,
    TransportError,
    aggregate_reward,
    decode_frame,
    default_config,
    encode_frame,
    local_reward,
    signal_statistics,
)

OP_PUT, OP_GET, OP_DEL, OP_PING = 1, 2, 3, 4
OP_OK, OP_TENSOR, OP_NOT_FOUND, OP_ERR = 128, 129, 130, 131
