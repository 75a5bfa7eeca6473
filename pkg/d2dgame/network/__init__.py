"""Import the network model into the network namespace for easy importing"""

from d2dgame.network.instance import NetworkInstance, PowerProfile, QosSpec, UEParams, QOS_KINDS
from d2dgame.network.performance import *
