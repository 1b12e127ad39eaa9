/* tslint:disable */
/* eslint-disable */

/**
 * Flow under a chosen velocity law, stepped on demand.
 */
export class FlowStepper {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Starts from `spec` rescaled to the equilibrium area.
     */
    constructor(spec: string, m: number, vol: number, law: string);
    state(): string;
    step(steps: number): string;
}

export function ball_quantities(n: number, vol: number): string;

export function solve_shape(spec: string, m: number, vol: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_flowstepper_free: (a: number, b: number) => void;
    readonly ball_quantities: (a: number, b: number) => [number, number, number, number];
    readonly flowstepper_new: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly flowstepper_state: (a: number) => [number, number];
    readonly flowstepper_step: (a: number, b: number) => [number, number, number, number];
    readonly solve_shape: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
