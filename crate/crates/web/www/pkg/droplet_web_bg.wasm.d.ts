/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_flowstepper_free: (a: number, b: number) => void;
export const ball_quantities: (a: number, b: number) => [number, number, number, number];
export const flowstepper_new: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const flowstepper_state: (a: number) => [number, number];
export const flowstepper_step: (a: number, b: number) => [number, number, number, number];
export const solve_shape: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
