"""REST surface of the emulator API, kept in one place.

Community EVE-NG paths; if the emulator's API drifts between versions,
this file is the only one that changes.
"""

LOGIN = ("POST", "/api/auth/login")
CREATE_LAB = ("POST", "/api/labs")
DELETE_LAB = ("DELETE", "/api/labs/{lab}")
CREATE_NODE = ("POST", "/api/labs/{lab}/nodes")
CREATE_NETWORK = ("POST", "/api/labs/{lab}/networks")
LINK = ("PUT", "/api/labs/{lab}/nodes/{node_id}/interfaces")
START_NODE = ("GET", "/api/labs/{lab}/nodes/{node_id}/start")
PUSH_CONFIG = ("PUT", "/api/labs/{lab}/configs/{node_id}")
LIST_NODES = ("GET", "/api/labs/{lab}/nodes")
LIST_NETWORKS = ("GET", "/api/labs/{lab}/networks")
GET_CONFIG = ("GET", "/api/labs/{lab}/configs/{node_id}")


def path(template: str, **params: object) -> str:
    return template.format(**params)
