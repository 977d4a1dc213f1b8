int main() {
 // P(q) {q#init>0}
}
