import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { FORWARD_SPEED, InputLoop, SEND_INTERVAL_MS, walkFromKeys } from "../src/input.js";
import { WalkOut } from "../src/protocol.js";

describe("walkFromKeys", () => {
    it("maps the forward key to the preferred walking speed", () => {
        const walk = walkFromKeys(new Set(["forward"]));
        expect(walk.forward).toBe(FORWARD_SPEED);
        expect(walk.forward).toBeCloseTo(1.4);
        expect(walk.strafe).toBe(0);
        expect(walk.turn).toBe(0);
    });

    it("opposing keys cancel", () => {
        const walk = walkFromKeys(new Set(["forward", "back"]));
        expect(walk.forward).toBe(0);
    });

    it("strafe and turn have their own axes", () => {
        const walk = walkFromKeys(new Set(["left", "turnRight"]));
        expect(walk.strafe).toBeGreaterThan(0);
        expect(walk.turn).toBeLessThan(0);
    });
});

describe("InputLoop", () => {
    let sent: WalkOut[];
    let loop: InputLoop;

    beforeEach(() => {
        vi.useFakeTimers();
        sent = [];
        loop = new InputLoop((w) => sent.push(w));
    });

    afterEach(() => {
        loop.stop();
        vi.useRealTimers();
    });

    it("streams the held state at >= 30 Hz", () => {
        expect(SEND_INTERVAL_MS).toBeLessThanOrEqual(1000 / 30);
        loop.start();
        loop.keyDown("KeyW");
        vi.advanceTimersByTime(1000);
        const nonZero = sent.filter((w) => w.forward > 0);
        expect(nonZero.length).toBeGreaterThanOrEqual(30);
        for (const w of nonZero) {
            expect(w.forward).toBeCloseTo(1.4);
        }
    });

    it("sends exactly one zero Walk on release", () => {
        loop.start();
        loop.keyDown("KeyW");
        vi.advanceTimersByTime(200);
        loop.keyUp("KeyW");
        const countAfterRelease = sent.length;
        vi.advanceTimersByTime(500);
        expect(sent.length).toBe(countAfterRelease); // no further sends
        const last = sent[sent.length - 1];
        expect(last.forward).toBe(0);
        expect(last.strafe).toBe(0);
        expect(last.turn).toBe(0);
        // and only that single zero
        const zeros = sent.filter((w) => w.forward === 0 && w.strafe === 0 && w.turn === 0);
        expect(zeros.length).toBe(1);
    });

    it("sends nothing while no key was ever pressed", () => {
        loop.start();
        vi.advanceTimersByTime(500);
        expect(sent.length).toBe(0);
    });

    it("ignores unmapped keys", () => {
        expect(loop.keyDown("KeyZ")).toBe(false);
        expect(loop.keyDown("ArrowUp")).toBe(true);
        loop.keyUp("ArrowUp");
    });

    it("arrow keys alias WASD", () => {
        loop.keyDown("ArrowUp");
        const last = sent[sent.length - 1];
        expect(last.forward).toBeCloseTo(1.4);
    });
});
