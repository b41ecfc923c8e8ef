// Top-down 2D scene renderer. All world-to-screen math happens here in
// plain numbers; the drawing surface only ever sees screen-space paths, so
// tests can rasterize through a tiny fake context.

import { MapGeometry } from "./map.js";
import { QuatTuple, SnapshotJson, VehicleJson } from "./protocol.js";
import { Camera, ViewModel } from "./viewmodel.js";

// structural subset of CanvasRenderingContext2D used by the renderer
export interface Draw2D {
    fillStyle: string;
    strokeStyle: string;
    lineWidth: number;
    font: string;
    fillRect(x: number, y: number, w: number, h: number): void;
    beginPath(): void;
    moveTo(x: number, y: number): void;
    lineTo(x: number, y: number): void;
    closePath(): void;
    fill(): void;
    stroke(): void;
    arc(x: number, y: number, r: number, a0: number, a1: number): void;
    fillText(text: string, x: number, y: number): void;
}

export const COLORS = {
    background: "#111827",
    road: "#374151",
    roadEdge: "#9ca3af",
    crosswalk: "#d1d5db",
    vehicle: "#3b82f6",
    walker: "#f59e0b",
    walkerHeading: "#78350f",
    ehmiOn: "#22d3ee",
    ehmiOff: "#1f2937",
    text: "#e5e7eb",
    toast: "#fbbf24",
};

export function worldToScreen(
    cam: Camera,
    width: number,
    height: number,
    x: number,
    y: number,
): [number, number] {
    return [width / 2 + (x - cam.cx) * cam.scale, height / 2 - (y - cam.cy) * cam.scale];
}

export function yawFromQuat(q: QuatTuple): number {
    const [w, x, y, z] = q;
    return Math.atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z));
}

// world-space corner helpers ---------------------------------------------------

function orientedRect(
    cx: number,
    cy: number,
    yaw: number,
    length: number,
    width: number,
): [number, number][] {
    const c = Math.cos(yaw);
    const s = Math.sin(yaw);
    const hl = length / 2;
    const hw = width / 2;
    const local: [number, number][] = [
        [hl, hw],
        [hl, -hw],
        [-hl, -hw],
        [-hl, hw],
    ];
    return local.map(([lx, ly]) => [cx + c * lx - s * ly, cy + s * lx + c * ly]);
}

export function vehicleBodyCorners(v: VehicleJson): [number, number][] {
    const yaw = yawFromQuat(v.quat);
    return orientedRect(v.pos[0], v.pos[1], yaw, v.dims[0], v.dims[1]);
}

export const EHMI_STRIP_DEPTH = 0.3; // meters of the front covered by the strip

export function ehmiStripCorners(v: VehicleJson): [number, number][] {
    const yaw = yawFromQuat(v.quat);
    const c = Math.cos(yaw);
    const s = Math.sin(yaw);
    // strip spans the entire front of the vehicle
    const front = v.dims[0] / 2;
    const cx = v.pos[0] + c * (front - EHMI_STRIP_DEPTH / 2);
    const cy = v.pos[1] + s * (front - EHMI_STRIP_DEPTH / 2);
    return orientedRect(cx, cy, yaw, EHMI_STRIP_DEPTH, v.dims[1]);
}

// drawing ----------------------------------------------------------------------

function fillPolygon(
    ctx: Draw2D,
    cam: Camera,
    width: number,
    height: number,
    points: [number, number][],
    color: string,
): void {
    if (points.length < 3) return;
    ctx.fillStyle = color;
    ctx.beginPath();
    const [sx, sy] = worldToScreen(cam, width, height, points[0][0], points[0][1]);
    ctx.moveTo(sx, sy);
    for (let i = 1; i < points.length; i++) {
        const [px, py] = worldToScreen(cam, width, height, points[i][0], points[i][1]);
        ctx.lineTo(px, py);
    }
    ctx.closePath();
    ctx.fill();
}

function strokePolyline(
    ctx: Draw2D,
    cam: Camera,
    width: number,
    height: number,
    points: [number, number][],
    color: string,
    lineWidth: number,
): void {
    if (points.length < 2) return;
    ctx.strokeStyle = color;
    ctx.lineWidth = lineWidth;
    ctx.beginPath();
    const [sx, sy] = worldToScreen(cam, width, height, points[0][0], points[0][1]);
    ctx.moveTo(sx, sy);
    for (let i = 1; i < points.length; i++) {
        const [px, py] = worldToScreen(cam, width, height, points[i][0], points[i][1]);
        ctx.lineTo(px, py);
    }
    ctx.stroke();
}

function drawRoads(ctx: Draw2D, cam: Camera, w: number, h: number, map: MapGeometry): void {
    for (const road of map.roads) {
        const ribbon = road.left_edge.concat([...road.right_edge].reverse());
        fillPolygon(ctx, cam, w, h, ribbon, COLORS.road);
        strokePolyline(ctx, cam, w, h, road.left_edge, COLORS.roadEdge, 1);
        strokePolyline(ctx, cam, w, h, road.right_edge, COLORS.roadEdge, 1);
    }
    for (const crosswalk of map.crosswalks) {
        fillPolygon(ctx, cam, w, h, crosswalk.polygon, COLORS.crosswalk);
    }
}

function drawVehicles(ctx: Draw2D, cam: Camera, w: number, h: number, snap: SnapshotJson): void {
    for (const v of snap.vehicles) {
        fillPolygon(ctx, cam, w, h, vehicleBodyCorners(v), COLORS.vehicle);
        const stripColor = v.ehmi.activated ? COLORS.ehmiOn : COLORS.ehmiOff;
        fillPolygon(ctx, cam, w, h, ehmiStripCorners(v), stripColor);
    }
}

export const WALKER_RADIUS_M = 0.35;

function drawWalker(ctx: Draw2D, cam: Camera, w: number, h: number, snap: SnapshotJson): void {
    const root = snap.walker.root;
    const [sx, sy] = worldToScreen(cam, w, h, root.pos[0], root.pos[1]);
    ctx.fillStyle = COLORS.walker;
    ctx.beginPath();
    ctx.arc(sx, sy, WALKER_RADIUS_M * cam.scale, 0, Math.PI * 2);
    ctx.fill();
    // heading tick: a thin quad from the disc edge outward
    const yaw = yawFromQuat(root.quat);
    const tick: [number, number][] = [
        [root.pos[0] + Math.cos(yaw) * WALKER_RADIUS_M * 0.4, root.pos[1] + Math.sin(yaw) * WALKER_RADIUS_M * 0.4],
        [root.pos[0] + Math.cos(yaw) * WALKER_RADIUS_M * 1.8, root.pos[1] + Math.sin(yaw) * WALKER_RADIUS_M * 1.8],
    ];
    strokePolyline(ctx, cam, w, h, tick, COLORS.walkerHeading, 2);
}

function drawHud(ctx: Draw2D, view: ViewModel, w: number): void {
    ctx.fillStyle = COLORS.text;
    ctx.font = "13px monospace";
    const snap = view.snapshot;
    const line = snap
        ? `tick ${snap.tick}  t=${snap.sim_time.toFixed(2)}s  phase=${snap.phase}  ${view.status}`
        : view.status;
    ctx.fillText(line, 10, 18);
    if (view.banner) {
        ctx.fillStyle = COLORS.toast;
        ctx.fillText(view.banner, 10, 36);
    }
    let row = 0;
    for (const toast of view.toasts.slice(-5)) {
        ctx.fillStyle = COLORS.toast;
        const text = toast.detail ? `${toast.kind}: ${toast.detail}` : toast.kind;
        ctx.fillText(text, w - 280, 18 + 16 * row);
        row += 1;
    }
}

export function renderFrame(
    ctx: Draw2D,
    width: number,
    height: number,
    view: ViewModel,
    map: MapGeometry | null,
): void {
    ctx.fillStyle = COLORS.background;
    ctx.fillRect(0, 0, width, height);

    if (view.snapshot === null) {
        ctx.fillStyle = COLORS.text;
        ctx.font = "16px monospace";
        ctx.fillText("waiting for snapshots...", width / 2 - 100, height / 2);
        drawHud(ctx, view, width);
        return;
    }
    const cam = view.camera;
    if (map !== null) {
        drawRoads(ctx, cam, width, height, map);
    }
    drawVehicles(ctx, cam, width, height, view.snapshot);
    drawWalker(ctx, cam, width, height, view.snapshot);
    drawHud(ctx, view, width);
}
