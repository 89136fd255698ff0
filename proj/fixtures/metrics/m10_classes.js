class Station {
  constructor(id) {
    this.id = id;
    this.depth = 0;
  }

  measure(delta) {
    this.depth += delta;
    return this.depth;
  }
}
