"""Single-server multi-message private information retrieval with side information.

Two linear protocols over F_q (GRS Code and Generalized Partition and Code),
the capacity formulas they achieve, exact privacy verification by
enumeration, span audits, and a JSON-lines TCP harness.
"""

from .capacity import CapacityValue, Plan, capacity_value, plan
from .gf import FieldParams, Fq, Message, field_arith, message_combine
from .gpc import GpcAnswer, GpcParams, GpcQuery, PartitionTrace, gpc_answer, gpc_decode, gpc_params, gpc_partition, gpc_query
from .grs import GrsAnswer, GrsQuery, grs_answer, grs_decode, grs_query
from .linalg import MatrixFq, rank, solve_square, units_in_span, vandermonde

__version__ = "0.1.0"
