/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_overlayview_free: (a: number, b: number) => void;
export const __wbg_plateview_free: (a: number, b: number) => void;
export const clampedPlate: (a: number, b: number) => [number, number, number];
export const interfaceCgHistory: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const overlayGeometry: (a: number, b: number, c: number) => [number, number, number];
export const overlayview_cells: (a: number) => number;
export const overlayview_coords: (a: number) => [number, number];
export const overlayview_faces: (a: number) => number;
export const overlayview_offsets: (a: number) => [number, number];
export const overlayview_totalArea: (a: number) => number;
export const plateview_deflection: (a: number) => [number, number];
export const plateview_maxDeflection: (a: number) => number;
export const plateview_n: (a: number) => number;
export const plateview_vertices: (a: number) => [number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
