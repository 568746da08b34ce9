/** Wire types served by the text2net service. */

export const SCHEMA_VERSION = "t2n-topology/1";

export interface InterfaceInfo {
  name: string;
  ipv4: string;
  prefix_len: number;
  network_id: number | null;
  is_loopback: boolean;
}

export interface StaticRouteInfo {
  destination: string | null;
  via: string | null;
  resolved_next_hop: string | null;
}

export interface DeviceInfo {
  hostname: string;
  node_type: string;
  node_configs: {
    basic: { hostname: string; interfaces: InterfaceInfo[] };
    L3: { static_routes: StaticRouteInfo[] };
  };
}

export interface EndpointInfo {
  device: string;
  interface: string;
}

export interface ConnectionInfo {
  endpoint_a: EndpointInfo;
  endpoint_b: EndpointInfo;
  network_id: number;
}

export interface TopologyDoc {
  schema: string;
  devices: DeviceInfo[];
  connections: ConnectionInfo[];
}

export interface SystemEventMsg {
  event: string; // Welcome | AskClarification | ProvisionDone | QueryResult | Error
  text: string;
  code?: string;
  success?: boolean;
  forward_path?: string[];
  reverse_path?: string[];
  failure_reason?: string | null;
}

export interface TranscriptEntry {
  role: "user" | "system";
  event: string;
  text: string;
}

export interface SessionResource {
  session_id: string;
  phase: string;
  backend: string;
  transcript: TranscriptEntry[];
  step_count: number;
  topology: TopologyDoc | null;
}
