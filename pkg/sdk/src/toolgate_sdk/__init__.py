"""Client-side tool-call interception for the toolgate gateway.

``auto()`` patches a supported LLM client library in place so that every
tool-use block in a model response is checked against the gateway before
the host application can execute the tool; ``instrument()`` wraps an
explicit client object. Blocked calls are replaced with an error result
the agent can read, and pending calls suspend the calling thread until a
reviewer decides (or the poll times out and fails closed).
"""

from .config import InterceptorConfig
from .client import GatewayClient, GatewayUnreachable
from .gate import GateResult, check_and_gate
from .interceptor import Activation, auto, instrument

__all__ = [
    "Activation",
    "GateResult",
    "GatewayClient",
    "GatewayUnreachable",
    "InterceptorConfig",
    "auto",
    "check_and_gate",
    "instrument",
]

__version__ = "0.1.0"
