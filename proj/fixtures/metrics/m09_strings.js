let x = "a;b" // c
let label = 'semi;colon'
let tpl = `n=${x} and ${label}`
let pattern = /;+/g
let division = 6 / 2
