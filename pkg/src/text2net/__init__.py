"""Text2Net: plain-English network scenarios to live topologies.

Pipeline: adapter (scenario text -> SCS) -> extractor (SCS -> topology
document) -> validator (findings / clarification) -> provisioning into the
built-in Layer-3 simulator or an EVE-NG style emulator.
"""

__version__ = "0.1.0"
