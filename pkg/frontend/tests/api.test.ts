import { describe, expect, it } from "vitest";

import { isValidIpv4 } from "../src/api.js";

describe("isValidIpv4", () => {
  it("accepts plain dotted quads", () => {
    for (const good of ["0.0.0.0", "192.168.2.1", "255.255.255.255", "10.0.0.7"]) {
      expect(isValidIpv4(good), good).toBe(true);
    }
  });

  it("rejects malformed or out-of-range input", () => {
    for (const bad of [
      "192.168.0.300",
      "256.1.1.1",
      "1.2.3",
      "1.2.3.4.5",
      "01.2.3.4",
      "a.b.c.d",
      "192.168.0.1/24",
      "",
      "  ",
    ]) {
      expect(isValidIpv4(bad), bad).toBe(false);
    }
  });
});
