/* tslint:disable */
/* eslint-disable */

/**
 * Overlay cells as flattened polygons: cell `i` owns the points
 * `coords[2 * offsets[i] .. 2 * offsets[i + 1]]`.
 */
export class OverlayView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly cells: number;
    readonly coords: Float64Array;
    readonly faces: number;
    readonly offsets: Uint32Array;
    readonly totalArea: number;
}

/**
 * Vertex deflections of a clamped plate; vertices are listed row by row.
 */
export class PlateView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly deflection: Float64Array;
    readonly maxDeflection: number;
    readonly n: number;
    readonly vertices: Float64Array;
}

/**
 * Clamped plate on `(−1, 1)²` with unit flexural rigidity under a uniform
 * transverse load.
 */
export function clampedPlate(plate_n: number, pressure: number): PlateView;

/**
 * Relative residuals of conjugate gradients on the interface problem.
 */
export function interfaceCgHistory(body_n: number, plate_n: number, flipped: boolean, tol: number): Float64Array;

/**
 * Common refinement of the body's interface faces and the plate mesh.
 */
export function overlayGeometry(body_n: number, plate_n: number, flipped: boolean): OverlayView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_overlayview_free: (a: number, b: number) => void;
    readonly __wbg_plateview_free: (a: number, b: number) => void;
    readonly clampedPlate: (a: number, b: number) => [number, number, number];
    readonly interfaceCgHistory: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly overlayGeometry: (a: number, b: number, c: number) => [number, number, number];
    readonly overlayview_cells: (a: number) => number;
    readonly overlayview_coords: (a: number) => [number, number];
    readonly overlayview_faces: (a: number) => number;
    readonly overlayview_offsets: (a: number) => [number, number];
    readonly overlayview_totalArea: (a: number) => number;
    readonly plateview_deflection: (a: number) => [number, number];
    readonly plateview_maxDeflection: (a: number) => number;
    readonly plateview_n: (a: number) => number;
    readonly plateview_vertices: (a: number) => [number, number];
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
