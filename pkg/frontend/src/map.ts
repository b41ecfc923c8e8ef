// Drawable map geometry, fetched from the server's /map.json route.

export interface RoadGeometryJson {
    id: string;
    name: string;
    centerline: [number, number][];
    left_edge: [number, number][];
    right_edge: [number, number][];
}

export interface CrosswalkJson {
    road_id: string;
    polygon: [number, number][];
}

export interface MapGeometry {
    roads: RoadGeometryJson[];
    crosswalks: CrosswalkJson[];
}

export async function fetchMapGeometry(baseUrl: string): Promise<MapGeometry> {
    const response = await fetch(new URL("/map.json", baseUrl));
    if (!response.ok) {
        throw new Error(`map geometry unavailable: HTTP ${response.status}`);
    }
    return (await response.json()) as MapGeometry;
}
